#include "piwno/autodiff.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace piwno::ad {

namespace {

using RM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRM = Eigen::Map<RM>;
using MapConstRM = Eigen::Map<const RM>;

constexpr double kInvSqrt2 = 0.70710678118654752440;
const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

int rows_of(const Shape& s) { return s.empty() ? 1 : s[0]; }
int cols_of(const Shape& s) {
    long n = numel(s);
    return static_cast<int>(n / rows_of(s));
}

}  // namespace

int Tape::push(Node n) {
    for (int k = 0; k < n.n_in; ++k)
        if (nodes_[n.in[k]].t.requires_grad) n.t.requires_grad = true;
    nodes_.push_back(std::move(n));
    const int id = static_cast<int>(nodes_.size()) - 1;
    check_finite(id);
    return id;
}

void Tape::check_finite(int id) const {
    if (!nodes_[id].t.values.allFinite())
        throw std::runtime_error("autodiff: non-finite values produced by op " +
                                 std::to_string(static_cast<int>(nodes_[id].op)));
}

void Tape::clear() {
    nodes_.clear();
    params_.clear();
}

double Tape::scalar(Var v) const {
    const auto& n = nodes_[v.id];
    require(numel(n.t.shape) == 1, "scalar: tensor is not a scalar");
    return n.t.values[0];
}

Var Tape::leaf(Shape shape, std::span<const double> values, bool requires_grad) {
    require(numel(shape) == static_cast<long>(values.size()), "leaf: shape/value mismatch");
    Node n;
    n.t.shape = std::move(shape);
    n.t.values = Eigen::Map<const Eigen::ArrayXd>(values.data(), values.size());
    n.t.requires_grad = requires_grad;
    return {push(std::move(n))};
}

Var Tape::zeros(Shape shape, bool requires_grad) {
    Node n;
    n.t.values = Eigen::ArrayXd::Zero(numel(shape));
    n.t.shape = std::move(shape);
    n.t.requires_grad = requires_grad;
    return {push(std::move(n))};
}

Var Tape::param(const ParamStore& store, const std::string& name) {
    for (const auto& [pname, id] : params_)
        if (pname == name) return {id};
    const Param& p = store.at(name);
    Node n;
    n.t.shape = p.shape;
    n.t.values = p.value;
    n.t.requires_grad = true;
    const int id = push(std::move(n));
    params_.emplace_back(name, id);
    return {id};
}

Var Tape::add(Var a, Var b) {
    require(t(a).shape == t(b).shape, "add: shape mismatch");
    Node n;
    n.op = Op::add;
    n.in = {a.id, b.id};
    n.n_in = 2;
    n.t.shape = t(a).shape;
    n.t.values = t(a).values + t(b).values;
    return {push(std::move(n))};
}

Var Tape::sub(Var a, Var b) {
    require(t(a).shape == t(b).shape, "sub: shape mismatch");
    Node n;
    n.op = Op::sub;
    n.in = {a.id, b.id};
    n.n_in = 2;
    n.t.shape = t(a).shape;
    n.t.values = t(a).values - t(b).values;
    return {push(std::move(n))};
}

Var Tape::mul(Var a, Var b) {
    require(t(a).shape == t(b).shape, "mul: shape mismatch");
    Node n;
    n.op = Op::mul;
    n.in = {a.id, b.id};
    n.n_in = 2;
    n.t.shape = t(a).shape;
    n.t.values = t(a).values * t(b).values;
    return {push(std::move(n))};
}

Var Tape::scale(Var a, double c) {
    Node n;
    n.op = Op::scale;
    n.in = {a.id};
    n.n_in = 1;
    n.c = c;
    n.t.shape = t(a).shape;
    n.t.values = t(a).values * c;
    return {push(std::move(n))};
}

Var Tape::gelu(Var a) {
    Node n;
    n.op = Op::gelu;
    n.in = {a.id};
    n.n_in = 1;
    n.t.shape = t(a).shape;
    const auto& x = t(a).values;
    n.t.values.resize(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i)
        n.t.values[i] = 0.5 * x[i] * (1.0 + std::erf(x[i] * kInvSqrt2));
    return {push(std::move(n))};
}

Var Tape::mean(Var a) {
    Node n;
    n.op = Op::mean;
    n.in = {a.id};
    n.n_in = 1;
    n.t.shape = {1};
    n.t.values.resize(1);
    n.t.values[0] = t(a).values.mean();
    return {push(std::move(n))};
}

Var Tape::gather(Var a, std::shared_ptr<const std::vector<int>> idx) {
    const int C = rows_of(t(a).shape);
    const int N = cols_of(t(a).shape);
    const int M = static_cast<int>(idx->size());
    for (int j : *idx) require(j >= 0 && j < N, "gather: index out of range");
    Node n;
    n.op = Op::gather;
    n.in = {a.id};
    n.n_in = 1;
    n.idx = idx;
    n.t.shape = {C, M};
    n.t.values.resize(static_cast<long>(C) * M);
    const auto& x = t(a).values;
    for (int c = 0; c < C; ++c)
        for (int m = 0; m < M; ++m)
            n.t.values[static_cast<long>(c) * M + m] = x[static_cast<long>(c) * N + (*idx)[m]];
    return {push(std::move(n))};
}

Var Tape::concat(Var a, Var b) {
    const int Ca = rows_of(t(a).shape), Cb = rows_of(t(b).shape);
    const int N = cols_of(t(a).shape);
    require(N == cols_of(t(b).shape), "concat: column count mismatch");
    Node n;
    n.op = Op::concat;
    n.in = {a.id, b.id};
    n.n_in = 2;
    n.t.shape = {Ca + Cb, N};
    n.t.values.resize(static_cast<long>(Ca + Cb) * N);
    n.t.values.head(static_cast<long>(Ca) * N) = t(a).values;
    n.t.values.tail(static_cast<long>(Cb) * N) = t(b).values;
    return {push(std::move(n))};
}

Var Tape::affine(Var w, Var x, Var b) {
    const int Cout = rows_of(t(w).shape), Cin = cols_of(t(w).shape);
    const int N = cols_of(t(x).shape);
    require(rows_of(t(x).shape) == Cin, "affine: weight/input channel mismatch");
    if (b.valid()) require(numel(t(b).shape) == Cout, "affine: bias shape mismatch");
    Node n;
    n.op = Op::affine;
    n.in = {w.id, x.id, b.valid() ? b.id : -1};
    n.n_in = b.valid() ? 3 : 2;
    n.t.shape = {Cout, N};
    n.t.values.resize(static_cast<long>(Cout) * N);
    MapConstRM W(t(w).values.data(), Cout, Cin);
    MapConstRM X(t(x).values.data(), Cin, N);
    MapRM Y(n.t.values.data(), Cout, N);
    Y.noalias() = W * X;
    if (b.valid())
        Y.colwise() += Eigen::Map<const Eigen::VectorXd>(t(b).values.data(), Cout);
    return {push(std::move(n))};
}

Var Tape::affine_const(std::shared_ptr<const Eigen::MatrixXd> m, Var x) {
    const int Cout = static_cast<int>(m->rows()), Cin = static_cast<int>(m->cols());
    const int N = cols_of(t(x).shape);
    require(rows_of(t(x).shape) == Cin, "affine_const: channel mismatch");
    Node n;
    n.op = Op::affine_const;
    n.in = {x.id};
    n.n_in = 1;
    n.cmat = std::move(m);
    n.t.shape = {Cout, N};
    n.t.values.resize(static_cast<long>(Cout) * N);
    MapConstRM X(t(x).values.data(), Cin, N);
    MapRM Y(n.t.values.data(), Cout, N);
    Y.noalias() = (*n.cmat) * X;
    return {push(std::move(n))};
}

Var Tape::sparse_apply(std::shared_ptr<const SparseMap> s, Var x) {
    const int C = rows_of(t(x).shape);
    const int N = cols_of(t(x).shape);
    require(s->cols() == N, "sparse_apply: operator/field size mismatch");
    Node n;
    n.op = Op::sparse_apply;
    n.in = {x.id};
    n.n_in = 1;
    n.smap = std::move(s);
    const int M = n.smap->rows();
    n.t.shape = {C, M};
    n.t.values.resize(static_cast<long>(C) * M);
    for (int c = 0; c < C; ++c) {
        std::span<const double> xin(t(x).values.data() + static_cast<long>(c) * N, N);
        std::span<double> yout(n.t.values.data() + static_cast<long>(c) * M, M);
        n.smap->apply(xin, yout);
    }
    return {push(std::move(n))};
}

Var Tape::wavelet_mix(std::shared_ptr<const WaveletMixPlan> plan, Var x,
                      std::array<Var, 4> weights) {
    const int C = rows_of(t(x).shape);
    const int N = cols_of(t(x).shape);
    require(N == plan->rows * plan->cols, "wavelet_mix: grid/field mismatch");

    Node n;
    n.op = Op::wavelet_mix;
    n.in = {x.id, weights[0].id, weights[1].id, weights[2].id, weights[3].id};
    n.n_in = 5;
    n.plan = plan;
    n.t.shape = {C, N};
    n.t.values.resize(static_cast<long>(C) * N);

    std::vector<wavelet::CoeffPyramid> pyrs(C);
    for (int c = 0; c < C; ++c) {
        std::span<const double> row(t(x).values.data() + static_cast<long>(c) * N, N);
        pyrs[c] = wavelet::dwt2_forward(row, plan->rows, plan->cols, *plan->basis,
                                        plan->levels);
    }
    const int P = static_cast<int>(pyrs[0].approx.v.size());
    const int coarse = plan->levels - 1;

    n.wcache = std::make_unique<WMixCache>();
    for (int s = 0; s < 4; ++s) n.wcache->sub[s].resize(C, P);
    for (int c = 0; c < C; ++c) {
        n.wcache->sub[0].row(c) = Eigen::Map<const Eigen::RowVectorXd>(pyrs[c].approx.v.data(), P);
        for (int s = 0; s < 3; ++s)
            n.wcache->sub[s + 1].row(c) =
                Eigen::Map<const Eigen::RowVectorXd>(pyrs[c].details[coarse][s].v.data(), P);
    }

    for (int s = 0; s < 4; ++s) {
        const auto& wt = t(weights[s]);
        Eigen::MatrixXd mixed(C, P);
        if (!plan->positionwise) {
            require(t(weights[s]).shape == Shape{C, C}, "wavelet_mix: weight shape");
            MapConstRM R(wt.values.data(), C, C);
            mixed.noalias() = R * n.wcache->sub[s];
        } else {
            require(numel(wt.shape) == static_cast<long>(P) * C * C,
                    "wavelet_mix: positionwise weight shape");
            for (int p = 0; p < P; ++p) {
                MapConstRM R(wt.values.data() + static_cast<long>(p) * C * C, C, C);
                mixed.col(p).noalias() = R * n.wcache->sub[s].col(p);
            }
        }
        for (int c = 0; c < C; ++c) {
            auto* dst = (s == 0) ? &pyrs[c].approx : &pyrs[c].details[coarse][s - 1];
            Eigen::Map<Eigen::RowVectorXd>(dst->v.data(), P) = mixed.row(c);
        }
    }

    for (int c = 0; c < C; ++c) {
        auto field = wavelet::dwt2_inverse(pyrs[c], *plan->basis);
        std::copy(field.begin(), field.end(), n.t.values.data() + static_cast<long>(c) * N);
    }
    return {push(std::move(n))};
}

void Tape::backward_node(int id) {
    Node& n = nodes_[id];
    const Eigen::ArrayXd& g = n.t.grad;
    auto grad_of = [&](int in_id) -> Eigen::ArrayXd* {
        Node& m = nodes_[in_id];
        if (!m.t.requires_grad) return nullptr;
        if (m.t.grad.size() == 0) m.t.grad = Eigen::ArrayXd::Zero(m.t.values.size());
        return &m.t.grad;
    };

    switch (n.op) {
        case Op::leaf:
            break;
        case Op::add: {
            if (auto* ga = grad_of(n.in[0])) *ga += g;
            if (auto* gb = grad_of(n.in[1])) *gb += g;
            break;
        }
        case Op::sub: {
            if (auto* ga = grad_of(n.in[0])) *ga += g;
            if (auto* gb = grad_of(n.in[1])) *gb -= g;
            break;
        }
        case Op::mul: {
            if (auto* ga = grad_of(n.in[0])) *ga += g * nodes_[n.in[1]].t.values;
            if (auto* gb = grad_of(n.in[1])) *gb += g * nodes_[n.in[0]].t.values;
            break;
        }
        case Op::scale: {
            if (auto* ga = grad_of(n.in[0])) *ga += g * n.c;
            break;
        }
        case Op::gelu: {
            if (auto* ga = grad_of(n.in[0])) {
                const auto& x = nodes_[n.in[0]].t.values;
                for (Eigen::Index i = 0; i < x.size(); ++i) {
                    const double cdf = 0.5 * (1.0 + std::erf(x[i] * kInvSqrt2));
                    const double pdf = kInvSqrt2Pi * std::exp(-0.5 * x[i] * x[i]);
                    (*ga)[i] += g[i] * (cdf + x[i] * pdf);
                }
            }
            break;
        }
        case Op::mean: {
            if (auto* ga = grad_of(n.in[0]))
                *ga += g[0] / static_cast<double>(ga->size());
            break;
        }
        case Op::gather: {
            if (auto* ga = grad_of(n.in[0])) {
                const int C = rows_of(n.t.shape);
                const int M = cols_of(n.t.shape);
                const int N = cols_of(nodes_[n.in[0]].t.shape);
                for (int c = 0; c < C; ++c)
                    for (int m = 0; m < M; ++m)
                        (*ga)[static_cast<long>(c) * N + (*n.idx)[m]] +=
                            g[static_cast<long>(c) * M + m];
            }
            break;
        }
        case Op::concat: {
            const long na = nodes_[n.in[0]].t.values.size();
            const long nb = nodes_[n.in[1]].t.values.size();
            if (auto* ga = grad_of(n.in[0])) *ga += g.head(na);
            if (auto* gb = grad_of(n.in[1])) *gb += g.tail(nb);
            break;
        }
        case Op::affine: {
            const Node& wn = nodes_[n.in[0]];
            const Node& xn = nodes_[n.in[1]];
            const int Cout = rows_of(wn.t.shape), Cin = cols_of(wn.t.shape);
            const int N = cols_of(xn.t.shape);
            MapConstRM G(g.data(), Cout, N);
            if (auto* gw = grad_of(n.in[0])) {
                MapConstRM X(xn.t.values.data(), Cin, N);
                MapRM GW(gw->data(), Cout, Cin);
                GW.noalias() += G * X.transpose();
            }
            if (auto* gx = grad_of(n.in[1])) {
                MapConstRM W(wn.t.values.data(), Cout, Cin);
                MapRM GX(gx->data(), Cin, N);
                GX.noalias() += W.transpose() * G;
            }
            if (n.n_in == 3 && n.in[2] >= 0) {
                if (auto* gb = grad_of(n.in[2])) {
                    Eigen::Map<Eigen::VectorXd> GB(gb->data(), Cout);
                    GB.noalias() += G.rowwise().sum();
                }
            }
            break;
        }
        case Op::affine_const: {
            if (auto* gx = grad_of(n.in[0])) {
                const int Cout = static_cast<int>(n.cmat->rows());
                const int Cin = static_cast<int>(n.cmat->cols());
                const int N = cols_of(nodes_[n.in[0]].t.shape);
                MapConstRM G(g.data(), Cout, N);
                MapRM GX(gx->data(), Cin, N);
                GX.noalias() += n.cmat->transpose() * G;
            }
            break;
        }
        case Op::sparse_apply: {
            if (auto* gx = grad_of(n.in[0])) {
                const int C = rows_of(n.t.shape);
                const int M = cols_of(n.t.shape);
                const int N = n.smap->cols();
                std::vector<double> tmp(N);
                for (int c = 0; c < C; ++c) {
                    std::span<const double> gin(g.data() + static_cast<long>(c) * M, M);
                    n.smap->apply_adjoint(gin, tmp);
                    Eigen::Map<Eigen::ArrayXd>(gx->data() + static_cast<long>(c) * N, N) +=
                        Eigen::Map<const Eigen::ArrayXd>(tmp.data(), N);
                }
            }
            break;
        }
        case Op::wavelet_mix: {
            const auto& plan = *n.plan;
            const int C = rows_of(n.t.shape);
            const int N = cols_of(n.t.shape);
            const int coarse = plan.levels - 1;
            const int P = static_cast<int>(n.wcache->sub[0].cols());

            // pyramid-domain gradient of the output
            std::vector<wavelet::CoeffPyramid> gpyr(C);
            for (int c = 0; c < C; ++c) {
                std::span<const double> row(g.data() + static_cast<long>(c) * N, N);
                gpyr[c] = wavelet::dwt2_adjoint_inverse(row, plan.rows, plan.cols,
                                                        *plan.basis, plan.levels);
            }
            Eigen::MatrixXd gsub[4];
            for (int s = 0; s < 4; ++s) gsub[s].resize(C, P);
            for (int c = 0; c < C; ++c) {
                gsub[0].row(c) = Eigen::Map<const Eigen::RowVectorXd>(gpyr[c].approx.v.data(), P);
                for (int s = 0; s < 3; ++s)
                    gsub[s + 1].row(c) = Eigen::Map<const Eigen::RowVectorXd>(
                        gpyr[c].details[coarse][s].v.data(), P);
            }

            const bool need_gx = nodes_[n.in[0]].t.requires_grad;
            for (int s = 0; s < 4; ++s) {
                const Node& wn = nodes_[n.in[1 + s]];
                Eigen::ArrayXd* gw = grad_of(n.in[1 + s]);
                Eigen::MatrixXd din;
                if (!plan.positionwise) {
                    if (gw) {
                        MapRM GW(gw->data(), C, C);
                        GW.noalias() += gsub[s] * n.wcache->sub[s].transpose();
                    }
                    if (need_gx) {
                        MapConstRM R(wn.t.values.data(), C, C);
                        din.noalias() = R.transpose() * gsub[s];
                    }
                } else {
                    if (need_gx) din.resize(C, P);
                    for (int p = 0; p < P; ++p) {
                        if (gw) {
                            MapRM GW(gw->data() + static_cast<long>(p) * C * C, C, C);
                            GW.noalias() += gsub[s].col(p) * n.wcache->sub[s].col(p).transpose();
                        }
                        if (need_gx) {
                            MapConstRM R(wn.t.values.data() + static_cast<long>(p) * C * C, C, C);
                            din.col(p).noalias() = R.transpose() * gsub[s].col(p);
                        }
                    }
                }
                if (need_gx) {
                    for (int c = 0; c < C; ++c) {
                        auto* dst = (s == 0) ? &gpyr[c].approx : &gpyr[c].details[coarse][s - 1];
                        Eigen::Map<Eigen::RowVectorXd>(dst->v.data(), P) = din.row(c);
                    }
                }
            }
            if (need_gx) {
                auto* gx = grad_of(n.in[0]);
                for (int c = 0; c < C; ++c) {
                    auto field = wavelet::dwt2_adjoint_forward(gpyr[c], *plan.basis);
                    Eigen::Map<Eigen::ArrayXd>(gx->data() + static_cast<long>(c) * N, N) +=
                        Eigen::Map<const Eigen::ArrayXd>(field.data(), N);
                }
            }
            break;
        }
    }
}

GradMap Tape::backward(Var loss) {
    require(loss.valid() && loss.id < size(), "backward: invalid loss handle");
    Node& ln = nodes_[loss.id];
    if (numel(ln.t.shape) != 1)
        throw std::invalid_argument("backward: loss must be scalar");
    if (!ln.t.requires_grad)
        throw std::invalid_argument("backward: loss does not depend on any parameter");

    ln.t.grad = Eigen::ArrayXd::Ones(1);
    for (int id = loss.id; id >= 0; --id) {
        Node& n = nodes_[id];
        if (!n.t.requires_grad || n.t.grad.size() == 0) continue;
        backward_node(id);
    }

    GradMap out;
    for (const auto& [name, id] : params_) {
        const Node& pn = nodes_[id];
        out[name] = (pn.t.grad.size() > 0) ? pn.t.grad
                                           : Eigen::ArrayXd::Zero(pn.t.values.size());
    }
    return out;
}

}  // namespace piwno::ad
