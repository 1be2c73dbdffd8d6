#pragma once

#include <Eigen/Sparse>
#include <memory>
#include <span>

namespace piwno {

/// Fixed sparse linear map with its transpose precomputed, so forward and
/// adjoint applications are both row-major products.
class SparseMap {
public:
    using Mat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

    SparseMap(Mat m) : mat_(std::move(m)), tr_(mat_.transpose()) {
        mat_.makeCompressed();
        tr_.makeCompressed();
    }

    int rows() const { return static_cast<int>(mat_.rows()); }
    int cols() const { return static_cast<int>(mat_.cols()); }
    const Mat& matrix() const { return mat_; }

    void apply(std::span<const double> x, std::span<double> y) const {
        Eigen::Map<const Eigen::VectorXd> xv(x.data(), cols());
        Eigen::Map<Eigen::VectorXd> yv(y.data(), rows());
        yv.noalias() = mat_ * xv;
    }

    void apply_adjoint(std::span<const double> y, std::span<double> x) const {
        Eigen::Map<const Eigen::VectorXd> yv(y.data(), rows());
        Eigen::Map<Eigen::VectorXd> xv(x.data(), cols());
        xv.noalias() = tr_ * yv;
    }

    /// this ∘ other as one map.
    static std::shared_ptr<SparseMap> compose(const SparseMap& a, const SparseMap& b) {
        Mat prod = (a.mat_ * b.mat_).pruned();
        return std::make_shared<SparseMap>(std::move(prod));
    }

    static std::shared_ptr<SparseMap> sum(const SparseMap& a, const SparseMap& b) {
        Mat s = a.mat_ + b.mat_;
        return std::make_shared<SparseMap>(std::move(s));
    }

private:
    Mat mat_;
    Mat tr_;
};

}  // namespace piwno
