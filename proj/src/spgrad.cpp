#include "piwno/spgrad.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace piwno::sp {

namespace {

struct Offset {
    int di, dj;
};

// Index offsets inside the Euclidean ball of the configured radius.
std::vector<Offset> ball_offsets(double radius, bool two_d) {
    const int r = static_cast<int>(std::floor(radius + 1e-12));
    if (r < 1) throw std::invalid_argument("build_stencil: radius below one spacing");
    std::vector<Offset> off;
    for (int di = -r; di <= r; ++di) {
        for (int dj = (two_d ? -r : 0); dj <= (two_d ? r : 0); ++dj) {
            if (di == 0 && dj == 0) continue;
            if (di * di + dj * dj <= radius * radius + 1e-12) off.push_back({di, dj});
        }
    }
    return off;
}

}  // namespace

void zero_row_sums(SparseMap::Mat& m) {
    for (int pass = 0; pass < 2; ++pass) {
        for (int r = 0; r < m.outerSize(); ++r) {
            double s = 0.0;
            double* diag = nullptr;
            for (SparseMap::Mat::InnerIterator it(m, r); it; ++it) {
                s += it.value();
                if (it.col() == r) diag = &it.valueRef();
            }
            if (diag) *diag -= s;
        }
    }
}

namespace {

// Resolves an index along one axis; returns -1 when the neighbor falls
// outside a bounded axis.
inline int resolve(int i, int d, int n, bool periodic) {
    int j = i + d;
    if (periodic) {
        const int period = n - 1;  // last sample duplicates the first
        j %= period;
        if (j < 0) j += period;
        return j;
    }
    return (j >= 0 && j < n) ? j : -1;
}

}  // namespace

StencilSet build_stencil(const GridSpec& grid, const StencilConfig& cfg) {
    if (grid.n0 < 3 || (grid.n1 != 1 && grid.n1 < 3))
        throw std::invalid_argument("build_stencil: need at least 3 points per axis");
    const bool two_d = !grid.is_1d();
    const auto offsets = ball_offsets(cfg.radius, two_d);
    const int R = static_cast<int>(std::floor(cfg.radius + 1e-12));
    const int np = grid.points();

    StencilSet set;
    set.grid = grid;
    set.cfg = cfg;
    set.points.resize(np);

    std::vector<Eigen::Triplet<double>> trip0, trip1;
    trip0.reserve(static_cast<size_t>(np) * (offsets.size() + 1));
    if (two_d) trip1.reserve(static_cast<size_t>(np) * (offsets.size() + 1));

    std::vector<int> nbr;
    std::vector<double> dx0, dx1;
    for (int i = 0; i < grid.n0; ++i) {
        for (int j = 0; j < (two_d ? grid.n1 : 1); ++j) {
            const int p = i * grid.n1 + j;
            // interior-shifted mode recenters the window so it fits the domain
            int ci = i, cj = j;
            if (cfg.boundary == StencilConfig::Boundary::interior_shifted) {
                if (!grid.periodic0) ci = std::clamp(i, R, grid.n0 - 1 - R);
                if (two_d && !grid.periodic1) cj = std::clamp(j, R, grid.n1 - 1 - R);
            }
            nbr.clear();
            dx0.clear();
            dx1.clear();
            for (const auto& o : offsets) {
                const int i2 = resolve(ci, o.di, grid.n0, grid.periodic0);
                const int j2 = two_d ? resolve(cj, o.dj, grid.n1, grid.periodic1) : 0;
                if (i2 < 0 || j2 < 0) continue;
                if (i2 == i && j2 == j) continue;
                nbr.push_back(i2 * grid.n1 + j2);
                dx0.push_back((ci + o.di - i) * grid.h0);
                dx1.push_back(two_d ? (cj + o.dj - j) * grid.h1 : 0.0);
            }
            const int nb = static_cast<int>(nbr.size());
            if (nb < 2) throw std::runtime_error("build_stencil: degenerate neighborhood");

            Eigen::Matrix2d M = Eigen::Matrix2d::Zero();
            for (int k = 0; k < nb; ++k) {
                M(0, 0) += dx0[k] * dx0[k];
                M(0, 1) += dx0[k] * dx1[k];
                M(1, 1) += dx1[k] * dx1[k];
            }
            M /= nb;
            M(1, 0) = M(0, 1);
            if (!two_d) {
                M(1, 1) = 1.0;
                M(0, 1) = M(1, 0) = 0.0;
            }
            const double scale = grid.h0 * grid.h0 * (two_d ? grid.h1 * grid.h1 : 1.0);
            if (M(0, 0) <= 0.0 || (two_d && M.determinant() <= 1e-12 * scale))
                throw std::runtime_error("build_stencil: singular moment matrix");
            const Eigen::Matrix2d Minv = M.inverse();

            set.points[p].neighbors = nbr;
            set.points[p].moment = M;

            // row weights: g_a = sum_k [(M^-1 dx_k)_a / N_b] (u_k - u_p)
            double c0 = 0.0, c1 = 0.0;
            for (int k = 0; k < nb; ++k) {
                const double w0 = (Minv(0, 0) * dx0[k] + Minv(0, 1) * dx1[k]) / nb;
                trip0.emplace_back(p, nbr[k], w0);
                c0 += w0;
                if (two_d) {
                    const double w1 = (Minv(1, 0) * dx0[k] + Minv(1, 1) * dx1[k]) / nb;
                    trip1.emplace_back(p, nbr[k], w1);
                    c1 += w1;
                }
            }
            trip0.emplace_back(p, p, -c0);  // rows sum to zero exactly
            if (two_d) trip1.emplace_back(p, p, -c1);
        }
    }

    SparseMap::Mat m0(np, np);
    m0.setFromTriplets(trip0.begin(), trip0.end());
    zero_row_sums(m0);
    set.d_axis[0] = std::make_shared<SparseMap>(std::move(m0));
    if (two_d) {
        SparseMap::Mat m1(np, np);
        m1.setFromTriplets(trip1.begin(), trip1.end());
        zero_row_sums(m1);
        set.d_axis[1] = std::make_shared<SparseMap>(std::move(m1));
    }
    return set;
}

std::shared_ptr<SparseMap> as_linear_map(const StencilSet& s, int order, int axis) {
    if (axis < 0 || axis > 1 || !s.d_axis[axis])
        throw std::invalid_argument("as_linear_map: no such axis");
    if (order == 1) return s.d_axis[axis];
    if (order == 2) {
        SparseMap::Mat prod =
            (s.d_axis[axis]->matrix() * s.d_axis[axis]->matrix()).pruned();
        zero_row_sums(prod);
        return std::make_shared<SparseMap>(std::move(prod));
    }
    throw std::invalid_argument("as_linear_map: order must be 1 or 2");
}

std::vector<std::vector<double>> sp_gradient(std::span<const double> field,
                                             const StencilSet& s) {
    if (static_cast<int>(field.size()) != s.grid.points())
        throw std::invalid_argument("sp_gradient: field/grid shape mismatch");
    std::vector<std::vector<double>> out;
    for (int a = 0; a < 2; ++a) {
        if (!s.d_axis[a]) break;
        std::vector<double> g(field.size());
        s.d_axis[a]->apply(field, g);
        out.push_back(std::move(g));
    }
    return out;
}

std::vector<double> sp_second(std::span<const double> field, const StencilSet& s,
                              int axis) {
    if (static_cast<int>(field.size()) != s.grid.points())
        throw std::invalid_argument("sp_second: field/grid shape mismatch");
    std::vector<double> g(field.size()), g2(field.size());
    s.d_axis[axis]->apply(field, g);
    s.d_axis[axis]->apply(g, g2);
    return g2;
}

}  // namespace piwno::sp
