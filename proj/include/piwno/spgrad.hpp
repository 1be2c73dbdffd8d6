#pragma once

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <vector>

#include "piwno/sparse_map.hpp"

namespace piwno::sp {

/// Uniform rectangular grid. 1-D grids set n1 = 1. A periodic axis treats
/// index n-1 as a duplicate sample of index 0 (period n-1 spacings).
struct GridSpec {
    int n0 = 1, n1 = 1;
    double h0 = 1.0, h1 = 1.0;
    bool periodic0 = false, periodic1 = false;

    int points() const { return n0 * n1; }
    bool is_1d() const { return n1 == 1; }
};

struct StencilConfig {
    /// Neighborhood radius in grid-spacing units; all grid points with
    /// (di^2 + dj^2) <= radius^2 (index offsets) belong to the neighborhood.
    double radius = 2.0;
    enum class Boundary { one_sided, interior_shifted };
    Boundary boundary = Boundary::one_sided;
};

/// Per-point neighborhood record kept for inspection and tests.
struct PointStencil {
    std::vector<int> neighbors;
    Eigen::Matrix2d moment;  // (1/N_b) sum dx dx^T; 1-D pads the unused axis with 1
};

/// Neighborhoods plus the equivalent sparse first-derivative maps.
struct StencilSet {
    GridSpec grid;
    StencilConfig cfg;
    std::vector<PointStencil> points;
    std::shared_ptr<SparseMap> d_axis[2];  // d_axis[1] is null on 1-D grids
};

/// Pins each row sum to floating-point zero by absorbing the residual into
/// the diagonal; keeps "derivative of constants is zero" tight even for
/// composed operators.
void zero_row_sums(SparseMap::Mat& m);

/// Builds deterministic full-neighborhood stencils for every grid point.
/// Throws on degenerate neighborhoods (singular moment matrix).
StencilSet build_stencil(const GridSpec& grid, const StencilConfig& cfg);

/// The estimator as a fixed sparse operator: order 1 is the per-axis
/// derivative map, order 2 the composition of that map with itself.
std::shared_ptr<SparseMap> as_linear_map(const StencilSet& s, int order, int axis);

/// First derivative of a sampled field along each axis.
std::vector<std::vector<double>> sp_gradient(std::span<const double> field,
                                             const StencilSet& s);

/// Second derivative along one axis by composition.
std::vector<double> sp_second(std::span<const double> field, const StencilSet& s,
                              int axis);

}  // namespace piwno::sp
