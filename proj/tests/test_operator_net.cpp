#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "piwno/operator_net.hpp"
#include "test_util.hpp"

using namespace piwno;
using namespace piwno::net;
using ad::Shape;
using ad::Tape;
using ad::Var;
using testutil::randu;

namespace {

WnoConfig tiny_cfg() {
    WnoConfig cfg;
    cfg.in_channels = 2;
    cfg.out_channels = 1;
    cfg.lift_dim = 4;
    cfg.blocks = 2;
    cfg.basis = "db2";
    cfg.levels = 2;
    cfg.rows = 16;
    cfg.cols = 16;
    cfg.proj_hidden = 8;
    return cfg;
}

void set_identity_mixing(WnoModel& m, int block) {
    const int dv = m.cfg.lift_dim;
    Eigen::ArrayXd eye = Eigen::ArrayXd::Zero(static_cast<long>(dv) * dv);
    for (int i = 0; i < dv; ++i) eye[static_cast<long>(i) * dv + i] = 1.0;
    for (const char* sub : {"ra", "rh", "rv", "rd"})
        m.params.at("blk" + std::to_string(block) + "." + sub).value = eye;
}

void set_zero_mixing(WnoModel& m, int block) {
    for (const char* sub : {"ra", "rh", "rv", "rd"})
        m.params.at("blk" + std::to_string(block) + "." + sub).value.setZero();
}

}  // namespace

TEST_CASE("seeded init is deterministic and shape-correct") {
    WnoConfig cfg = tiny_cfg();
    cfg.lift_dim = 64;
    cfg.in_channels = 3;
    auto m1 = init_model(cfg, 42);
    auto m2 = init_model(cfg, 42);
    auto m3 = init_model(cfg, 43);
    bool identical = true, differs = false;
    for (const auto& [name, p] : m1.params.all()) {
        identical &= (p.value == m2.params.at(name).value).all();
        differs |= (p.value != m3.params.at(name).value).any();
    }
    CHECK(identical);
    CHECK(differs);
    CHECK(m1.params.at("P.w").shape == Shape{64, 3});
    CHECK(m1.params.at("P.b").shape == Shape{64});
}

TEST_CASE("parameter count matches an independent hand count") {
    WnoConfig cfg;
    cfg.in_channels = 3;
    cfg.out_channels = 1;
    cfg.lift_dim = 64;
    cfg.blocks = 4;
    cfg.levels = 3;
    cfg.rows = 65;
    cfg.cols = 65;
    auto m = init_model(cfg, 1);
    // lift + l * (4 mixing tensors + residual linear) + two-stage projection
    const long lift = 3 * 64 + 64;
    const long per_block = 4 * 64 * 64 + 64 * 64 + 64;
    const long proj = 64 * 128 + 128 + 128 * 1 + 1;
    CHECK(m.param_count() == lift + 4 * per_block + proj);
    CHECK(m.param_count() == 90881);
}

TEST_CASE("lift is pointwise and affine") {
    auto cfg = tiny_cfg();
    auto m = init_model(cfg, 5);
    const int N = cfg.rows * cfg.cols;

    SUBCASE("zero input and zero bias give zero latent") {
        m.params.at("P.b").value.setZero();
        Tape t;
        auto a = t.zeros({cfg.in_channels, N});
        auto v = lift(t, m, a);
        CHECK(t.t(v).values.abs().maxCoeff() == 0.0);
    }
    SUBCASE("permuting grid points permutes outputs identically") {
        auto av = randu(static_cast<long>(cfg.in_channels) * N, 7);
        std::vector<int> perm(N);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), std::mt19937_64(3));
        Eigen::ArrayXd ap(av.size());
        for (int c = 0; c < cfg.in_channels; ++c)
            for (int p = 0; p < N; ++p)
                ap[static_cast<long>(c) * N + p] = av[static_cast<long>(c) * N + perm[p]];
        Tape t;
        auto v = lift(t, m, t.leaf({cfg.in_channels, N}, std::span<const double>(av.data(), av.size())));
        auto vp = lift(t, m, t.leaf({cfg.in_channels, N}, std::span<const double>(ap.data(), ap.size())));
        for (int c = 0; c < cfg.lift_dim; ++c)
            for (int p = 0; p < N; ++p)
                CHECK(t.t(vp).values[static_cast<long>(c) * N + p] ==
                      t.t(v).values[static_cast<long>(c) * N + perm[p]]);
    }
    SUBCASE("identity-embedded P reproduces input channels") {
        m.params.at("P.w").value.setZero();
        m.params.at("P.b").value.setZero();
        for (int c = 0; c < cfg.in_channels; ++c)
            m.params.at("P.w").value[static_cast<long>(c) * cfg.in_channels + c] = 1.0;
        auto av = randu(static_cast<long>(cfg.in_channels) * N, 9);
        Tape t;
        auto v = lift(t, m, t.leaf({cfg.in_channels, N}, std::span<const double>(av.data(), av.size())));
        for (long i = 0; i < static_cast<long>(cfg.in_channels) * N; ++i)
            CHECK(t.t(v).values[i] == av[i]);
    }
}

TEST_CASE("spectral_conv with identity mixing is the identity") {
    auto cfg = tiny_cfg();
    auto m = init_model(cfg, 5);
    set_identity_mixing(m, 0);
    const int N = cfg.rows * cfg.cols;
    auto xv = randu(static_cast<long>(cfg.lift_dim) * N, 17);
    Tape t;
    auto v = t.leaf({cfg.lift_dim, N}, std::span<const double>(xv.data(), xv.size()));
    auto y = spectral_conv(t, m, 0, v);
    CHECK((t.t(y).values - xv).abs().maxCoeff() < 1e-10);
}

TEST_CASE("spectral_conv with zero mixing matches direct pyramid surgery") {
    auto cfg = tiny_cfg();
    auto m = init_model(cfg, 5);
    set_zero_mixing(m, 1);
    const int N = cfg.rows * cfg.cols;
    auto xv = randu(static_cast<long>(cfg.lift_dim) * N, 19);
    Tape t;
    auto v = t.leaf({cfg.lift_dim, N}, std::span<const double>(xv.data(), xv.size()));
    auto y = spectral_conv(t, m, 1, v);
    // oracle: zero the coarsest subbands by hand, keep finer details
    for (int c = 0; c < cfg.lift_dim; ++c) {
        std::span<const double> row(xv.data() + static_cast<long>(c) * N, N);
        auto pyr = wavelet::dwt2_forward(row, cfg.rows, cfg.cols, *m.basis, cfg.levels);
        pyr.approx.v.assign(pyr.approx.v.size(), 0.0);
        for (auto& s : pyr.details[cfg.levels - 1]) s.v.assign(s.v.size(), 0.0);
        auto want = wavelet::dwt2_inverse(pyr, *m.basis);
        for (int p = 0; p < N; ++p)
            CHECK(t.t(y).values[static_cast<long>(c) * N + p] ==
                  doctest::Approx(want[p]).epsilon(1e-12));
    }
}

TEST_CASE("spectral_conv is linear in the latent field") {
    auto cfg = tiny_cfg();
    auto m = init_model(cfg, 5);
    const int N = cfg.rows * cfg.cols;
    auto x1 = randu(static_cast<long>(cfg.lift_dim) * N, 23);
    auto x2 = randu(static_cast<long>(cfg.lift_dim) * N, 29);
    const double a = 0.7, b = -1.3;
    Eigen::ArrayXd mix = a * x1 + b * x2;
    Tape t;
    auto vmix = t.leaf({cfg.lift_dim, N}, std::span<const double>(mix.data(), mix.size()));
    auto v1 = t.leaf({cfg.lift_dim, N}, std::span<const double>(x1.data(), x1.size()));
    auto v2 = t.leaf({cfg.lift_dim, N}, std::span<const double>(x2.data(), x2.size()));
    auto ymix = spectral_conv(t, m, 0, vmix);
    auto y1 = spectral_conv(t, m, 0, v1);
    auto y2 = spectral_conv(t, m, 0, v2);
    CHECK((t.t(ymix).values - (a * t.t(y1).values + b * t.t(y2).values)).abs().maxCoeff() <
          1e-11);
}

TEST_CASE("wavelet block zero case and identity composition") {
    SUBCASE("zero latent and zero biases stay zero") {
        auto cfg = tiny_cfg();
        auto m = init_model(cfg, 5);
        m.params.at("blk0.wb").value.setZero();
        Tape t;
        auto v = t.zeros({cfg.lift_dim, cfg.rows * cfg.cols});
        auto y = wavelet_block(t, m, 0, v);
        CHECK(t.t(y).values.abs().maxCoeff() == 0.0);
    }
    SUBCASE("W = identity with null spectral path is the identity block") {
        auto cfg = tiny_cfg();
        cfg.levels = 1;  // one level: every subband is parameterized
        cfg.activation = "identity";
        auto m = init_model(cfg, 5);
        set_zero_mixing(m, 0);
        auto& W = m.params.at("blk0.w");
        W.value.setZero();
        for (int i = 0; i < cfg.lift_dim; ++i)
            W.value[static_cast<long>(i) * cfg.lift_dim + i] = 1.0;
        m.params.at("blk0.wb").value.setZero();
        const int N = cfg.rows * cfg.cols;
        auto xv = randu(static_cast<long>(cfg.lift_dim) * N, 31);
        Tape t;
        auto v = t.leaf({cfg.lift_dim, N}, std::span<const double>(xv.data(), xv.size()));
        auto y = wavelet_block(t, m, 0, v);
        CHECK((t.t(y).values - xv).abs().maxCoeff() < 1e-11);
    }
}

TEST_CASE("block gradients match finite differences") {
    auto cfg = tiny_cfg();
    cfg.rows = cfg.cols = 8;
    cfg.levels = 2;
    auto m = init_model(cfg, 13);
    const int N = cfg.rows * cfg.cols;
    auto xv = randu(static_cast<long>(cfg.lift_dim) * N, 37, -0.5, 0.5);
    testutil::fd_check(
        m.params,
        [&](Tape& t, ad::ParamStore&, ad::GradMap* g) {
            auto v = t.leaf({cfg.lift_dim, N}, std::span<const double>(xv.data(), xv.size()));
            auto u = wavelet_block(t, m, 0, v);
            auto loss = t.mean(t.square(u));
            if (g) *g = t.backward(loss);
            return t.scalar(loss);
        },
        1e-5, 1e-6, 7);
}

TEST_CASE("forward output shape follows the grid") {
    for (auto [rows, cols] : {std::pair{81, 81}, std::pair{65, 65}}) {
        WnoConfig cfg = tiny_cfg();
        cfg.rows = rows;
        cfg.cols = cols;
        cfg.levels = 3;
        cfg.in_channels = 3;
        auto m = init_model(cfg, 3);
        Tape t;
        auto av = randu(static_cast<long>(3) * rows * cols, 41);
        auto a = testutil::leafv(t, {3, rows * cols}, av);
        auto u = wno_forward(t, m, a);
        CHECK(t.t(u).shape == Shape{1, rows * cols});
    }
}

TEST_CASE("all-zero parameters give all-zero output") {
    auto cfg = tiny_cfg();
    auto m = init_model(cfg, 3);
    for (auto& [name, p] : m.params.all()) p.value.setZero();
    Tape t;
    const int N = cfg.rows * cfg.cols;
    auto av = randu(static_cast<long>(cfg.in_channels) * N, 43);
    auto a = testutil::leafv(t, {cfg.in_channels, N}, av);
    auto u = wno_forward(t, m, a);
    CHECK(t.t(u).values.abs().maxCoeff() == 0.0);
}

TEST_CASE("resolution contract: shared weights run on other grids") {
    auto cfg = tiny_cfg();
    auto m = init_model(cfg, 3);
    for (int n : {12, 24, 32}) {
        Tape t;
        auto av = randu(static_cast<long>(cfg.in_channels) * n * n, 47);
        auto a = testutil::leafv(t, {cfg.in_channels, n * n}, av);
        auto u = wno_forward_on(t, m, a, n, n);
        CHECK(t.t(u).shape == Shape{1, n * n});
    }
    // positionwise weights pin the coarsest grid size
    auto cfgp = tiny_cfg();
    cfgp.positionwise = true;
    auto mp = init_model(cfgp, 3);
    Tape t;
    auto av2 = randu(static_cast<long>(cfgp.in_channels) * 32 * 32, 53);
    auto a = testutil::leafv(t, {cfgp.in_channels, 32 * 32}, av2);
    CHECK_THROWS(wno_forward_on(t, mp, a, 32, 32));
}

TEST_CASE("forward is a pure function of input and model") {
    auto cfg = tiny_cfg();
    auto m = init_model(cfg, 11);
    const int N = cfg.rows * cfg.cols;
    auto av = randu(static_cast<long>(cfg.in_channels) * N, 59);
    auto u1 = forward_values(m, std::span<const double>(av.data(), av.size()));
    auto u2 = forward_values(m, std::span<const double>(av.data(), av.size()));
    CHECK((u1 == u2).all());
}

TEST_CASE("blocks are linear pre-activation") {
    auto cfg = tiny_cfg();
    cfg.activation = "identity";
    auto m = init_model(cfg, 11);
    const int N = cfg.rows * cfg.cols;
    m.params.at("blk0.wb").value.setZero();
    auto x1 = randu(static_cast<long>(cfg.lift_dim) * N, 61);
    auto x2 = randu(static_cast<long>(cfg.lift_dim) * N, 67);
    const double a = 2.0, b = -0.5;
    Eigen::ArrayXd mix = a * x1 + b * x2;
    Tape t;
    auto y1 = wavelet_block(t, m, 0, t.leaf({cfg.lift_dim, N}, std::span<const double>(x1.data(), x1.size())));
    auto y2 = wavelet_block(t, m, 0, t.leaf({cfg.lift_dim, N}, std::span<const double>(x2.data(), x2.size())));
    auto ym = wavelet_block(t, m, 0, t.leaf({cfg.lift_dim, N}, std::span<const double>(mix.data(), mix.size())));
    CHECK((t.t(ym).values - (a * t.t(y1).values + b * t.t(y2).values)).abs().maxCoeff() <
          1e-10);
}

TEST_CASE("full tiny-model parameter gradients match finite differences") {
    WnoConfig cfg = tiny_cfg();  // d_v=4, 2 blocks, 16x16
    auto m = init_model(cfg, 71);
    const int N = cfg.rows * cfg.cols;
    auto av = randu(static_cast<long>(cfg.in_channels) * N, 73, -0.5, 0.5);
    auto target = randu(N, 79, -0.5, 0.5);
    testutil::fd_check(
        m.params,
        [&](Tape& t, ad::ParamStore&, ad::GradMap* g) {
            auto a = t.leaf({cfg.in_channels, N}, std::span<const double>(av.data(), av.size()));
            auto u = wno_forward(t, m, a);
            auto diff = t.sub(u, t.leaf({1, N}, std::span<const double>(target.data(), N)));
            auto loss = t.mean(t.square(diff));
            if (g) *g = t.backward(loss);
            return t.scalar(loss);
        },
        1e-5, 1e-6, 5);
}
