#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "piwno/spgrad.hpp"

using namespace piwno;
using namespace piwno::sp;
using std::numbers::pi;

namespace {

std::vector<double> sample2(const GridSpec& g, double lo0, double lo1,
                            double (*f)(double, double)) {
    std::vector<double> out(g.points());
    for (int i = 0; i < g.n0; ++i)
        for (int j = 0; j < g.n1; ++j)
            out[i * g.n1 + j] = f(lo0 + i * g.h0, lo1 + j * g.h1);
    return out;
}

double interior_rel_l2(const std::vector<double>& got, const std::vector<double>& want,
                       const GridSpec& g, int inset) {
    double num = 0.0, den = 0.0;
    for (int i = inset; i < g.n0 - inset; ++i)
        for (int j = inset; j < g.n1 - inset; ++j) {
            const double d = got[i * g.n1 + j] - want[i * g.n1 + j];
            num += d * d;
            den += want[i * g.n1 + j] * want[i * g.n1 + j];
        }
    return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("interior second moment on a 1-D grid, radius 2h") {
    const double h = 0.125;
    GridSpec g{9, 1, h, 1.0};
    auto s = build_stencil(g, {});
    // interior point: neighbors {-2h,-h,h,2h}, M = (1/4)(2h^2 + 8h^2)
    const auto& p = s.points[4];
    CHECK(p.neighbors.size() == 4);
    CHECK(p.moment(0, 0) == doctest::Approx(2.5 * h * h).epsilon(1e-14));
}

TEST_CASE("rows kill constants") {
    GridSpec g{17, 17, 0.25, 0.5};
    auto s = build_stencil(g, {});
    // stored row sums pinned to zero
    for (int axis = 0; axis < 2; ++axis) {
        const auto& m = s.d_axis[axis]->matrix();
        for (int r = 0; r < m.outerSize(); ++r) {
            double sum = 0.0;
            for (SparseMap::Mat::InnerIterator it(m, r); it; ++it) sum += it.value();
            CHECK(std::abs(sum) < 1e-14);
        }
    }
    std::vector<double> c(g.points(), 7.5), out(g.points());
    s.d_axis[0]->apply(c, out);
    for (double v : out) CHECK(std::abs(v) < 1e-12);
    s.d_axis[1]->apply(c, out);
    for (double v : out) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("one-sided boundary stencils keep interior-side neighbors") {
    GridSpec g{9, 1, 1.0, 1.0};
    auto s = build_stencil(g, {});
    CHECK(s.points[0].neighbors.size() >= 2);  // {+h, +2h}
    CHECK(s.points[0].neighbors[0] > 0);
    CHECK(s.points[8].neighbors.size() >= 2);
}

TEST_CASE("affine fields are differentiated exactly everywhere") {
    GridSpec g{21, 17, 1.0 / 20, 1.0 / 16};
    for (auto mode : {StencilConfig::Boundary::one_sided,
                      StencilConfig::Boundary::interior_shifted}) {
        StencilConfig cfg;
        cfg.boundary = mode;
        auto s = build_stencil(g, cfg);
        auto u = sample2(g, 0, 0, [](double x, double y) { return 1.5 + 3.0 * x - 2.0 * y; });
        auto grads = sp_gradient(u, s);
        for (double v : grads[0]) CHECK(std::abs(v - 3.0) < 1e-12);
        for (double v : grads[1]) CHECK(std::abs(v + 2.0) < 1e-12);
    }
}

TEST_CASE("quadratics are exact on symmetric interior stencils") {
    GridSpec g{33, 1, 1.0 / 32, 1.0};
    auto s = build_stencil(g, {});
    std::vector<double> u(g.n0), want(g.n0);
    for (int i = 0; i < g.n0; ++i) {
        const double x = i * g.h0;
        u[i] = x * x;
        want[i] = 2.0 * x;
    }
    auto grads = sp_gradient(u, s);
    for (int i = 2; i < g.n0 - 2; ++i) CHECK(std::abs(grads[0][i] - want[i]) < 1e-12);
    // composed second derivative: exact two stencil widths in
    auto uxx = sp_second(u, s, 0);
    for (int i = 4; i < g.n0 - 4; ++i) CHECK(std::abs(uxx[i] - 2.0) < 1e-10);
}

TEST_CASE("affine second derivatives vanish") {
    GridSpec g{17, 17, 1.0 / 16, 1.0 / 16};
    auto s = build_stencil(g, {});
    auto u = sample2(g, 0, 0, [](double x, double y) { return 0.25 - x + 4.0 * y; });
    auto uxx = sp_second(u, s, 0);
    auto uyy = sp_second(u, s, 1);
    for (double v : uxx) CHECK(std::abs(v) < 1e-12);
    for (double v : uyy) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("u = sin(pi x) second derivative on 65 points, radius 2h") {
    GridSpec g{65, 1, 1.0 / 64, 1.0};
    auto s = build_stencil(g, {});
    std::vector<double> u(g.n0), want(g.n0);
    for (int i = 0; i < g.n0; ++i) {
        const double x = i * g.h0;
        u[i] = std::sin(pi * x);
        want[i] = -pi * pi * std::sin(pi * x);
    }
    auto uxx = sp_second(u, s, 0);
    double num = 0.0, den = 0.0;
    for (int i = 4; i < g.n0 - 4; ++i) {
        num += (uxx[i] - want[i]) * (uxx[i] - want[i]);
        den += want[i] * want[i];
    }
    CHECK(std::sqrt(num / den) <= 2e-2);
}

TEST_CASE("adjoint identity and dense-assembly oracle on a 9x9 grid") {
    GridSpec g{9, 9, 0.125, 0.125};
    auto s = build_stencil(g, {});
    const int n = g.points();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(-1, 1);
    for (int axis = 0; axis < 2; ++axis) {
        auto D = as_linear_map(s, 1, axis);
        std::vector<double> u(n), w(n), du(n), dtw(n);
        for (auto& v : u) v = dist(rng);
        for (auto& v : w) v = dist(rng);
        D->apply(u, du);
        D->apply_adjoint(w, dtw);
        double lhs = 0.0, rhs = 0.0;
        for (int i = 0; i < n; ++i) {
            lhs += du[i] * w[i];
            rhs += u[i] * dtw[i];
        }
        CHECK(std::abs(lhs - rhs) < 1e-12 * (1.0 + std::abs(lhs)));

        // columns of the sparse operator match a dense assembly from basis vectors
        Eigen::MatrixXd dense = Eigen::MatrixXd(D->matrix());
        std::vector<double> e(n, 0.0), col(n);
        for (int j = 0; j < n; j += 17) {
            std::fill(e.begin(), e.end(), 0.0);
            e[j] = 1.0;
            D->apply(e, col);
            for (int i = 0; i < n; ++i) CHECK(col[i] == doctest::Approx(dense(i, j)).epsilon(1e-14));
        }
    }
}

TEST_CASE("gradient error is O(h^2) on sin(pi x) sin(pi y)") {
    auto run = [](int n) {
        GridSpec g{n, n, 1.0 / (n - 1), 1.0 / (n - 1)};
        auto s = build_stencil(g, {});
        auto u = sample2(g, 0, 0, [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); });
        auto want = sample2(g, 0, 0, [](double x, double y) { return pi * std::cos(pi * x) * std::sin(pi * y); });
        auto grads = sp_gradient(u, s);
        return interior_rel_l2(grads[0], want, g, 2);
    };
    const double e65 = run(65), e129 = run(129);
    CHECK(e65 / e129 >= 3.5);
}

TEST_CASE("translation equivariance on a periodic grid") {
    GridSpec g{33, 33, 1.0 / 32, 1.0 / 32, true, true};
    auto s = build_stencil(g, {});
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> dist(-1, 1);
    const int period = 32;
    std::vector<double> u(g.points());
    // periodic sample: index 32 duplicates index 0
    for (int i = 0; i < period; ++i)
        for (int j = 0; j < period; ++j) u[i * g.n1 + j] = dist(rng);
    for (int i = 0; i < g.n0; ++i) u[i * g.n1 + period] = u[i * g.n1];
    for (int j = 0; j < g.n1; ++j) u[period * g.n1 + j] = u[j];

    const int si = 5, sj = 11;
    std::vector<double> shifted(g.points());
    auto wrap = [period](int i) { return ((i % period) + period) % period; };
    for (int i = 0; i < g.n0; ++i)
        for (int j = 0; j < g.n1; ++j)
            shifted[i * g.n1 + j] = u[wrap(i + si) * g.n1 + wrap(j + sj)];

    auto gu = sp_gradient(u, s);
    auto gs = sp_gradient(shifted, s);
    for (int a = 0; a < 2; ++a)
        for (int i = 0; i < period; ++i)
            for (int j = 0; j < period; ++j)
                CHECK(gs[a][i * g.n1 + j] ==
                      doctest::Approx(gu[a][wrap(i + si) * g.n1 + wrap(j + sj)]).epsilon(1e-12));
}

TEST_CASE("degenerate neighborhoods are rejected") {
    GridSpec g{3, 1, 0.5, 1.0};
    StencilConfig cfg;
    cfg.radius = 1.0;  // endpoint sees a single neighbor
    CHECK_THROWS(build_stencil(g, cfg));
    CHECK_THROWS(build_stencil(GridSpec{2, 1, 1.0, 1.0}, StencilConfig{}));
}

TEST_CASE("grid/shape mismatches are rejected") {
    GridSpec g{9, 9, 0.125, 0.125};
    auto s = build_stencil(g, {});
    std::vector<double> wrong(10, 0.0);
    CHECK_THROWS(sp_gradient(wrong, s));
    CHECK_THROWS(as_linear_map(s, 3, 0));
}
