#include "piwno/operator_net.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace piwno::net {

using ad::Shape;
using ad::Tape;
using ad::Var;

int coarsest_size(int n, int levels) {
    for (int l = 0; l < levels; ++l) n = (n + 1) / 2;
    return n;
}

namespace {

Eigen::ArrayXd uniform(std::mt19937_64& rng, long n, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    Eigen::ArrayXd a(n);
    for (long i = 0; i < n; ++i) a[i] = d(rng);
    return a;
}

void add_linear(ad::ParamStore& p, std::mt19937_64& rng, const std::string& name,
                int out, int in) {
    const double b = 1.0 / std::sqrt(static_cast<double>(in));
    p.add(name + ".w", {out, in}, uniform(rng, static_cast<long>(out) * in, -b, b));
    p.add(name + ".b", {out}, uniform(rng, out, -b, b));
}

bool block_active(const WnoConfig& cfg, int block) {
    if (block == cfg.blocks - 1) return false;  // projection sees an unclipped field
    if (!cfg.block_activation.empty()) return cfg.block_activation[block] != 0;
    return cfg.activation == "gelu";
}

}  // namespace

WnoModel init_model(const WnoConfig& cfg, uint64_t seed) {
    if (cfg.lift_dim < 1 || cfg.blocks < 1 || cfg.in_channels < 1 || cfg.out_channels < 1)
        throw std::invalid_argument("init_model: invalid dimensions");
    if (cfg.rows < 1 || cfg.cols < 1)
        throw std::invalid_argument("init_model: grid shape required");
    if (!cfg.block_activation.empty() &&
        cfg.block_activation.size() != static_cast<size_t>(cfg.blocks))
        throw std::invalid_argument("init_model: block_activation length mismatch");

    WnoModel m;
    m.cfg = cfg;
    m.basis = std::make_shared<wavelet::WaveletBasis>(wavelet::make_basis(cfg.basis));
    auto plan = std::make_shared<ad::WaveletMixPlan>();
    plan->basis = m.basis;
    plan->rows = cfg.rows;
    plan->cols = cfg.cols;
    plan->levels = cfg.levels;
    plan->positionwise = cfg.positionwise;
    m.plan = plan;

    // validates the depth against the grid
    (void)wavelet::dwt2_forward(std::vector<double>(static_cast<size_t>(cfg.rows) * cfg.cols, 0.0),
                                cfg.rows, cfg.cols, *m.basis, cfg.levels);

    std::mt19937_64 rng(seed);
    const int dv = cfg.lift_dim;
    add_linear(m.params, rng, "P", dv, cfg.in_channels);
    const int pr = coarsest_size(cfg.rows, cfg.levels);
    const int pc = coarsest_size(cfg.cols, cfg.levels);
    const long P = static_cast<long>(pr) * pc;
    for (int b = 0; b < cfg.blocks; ++b) {
        const std::string pre = "blk" + std::to_string(b) + ".";
        const long wn = cfg.positionwise ? P * dv * dv : static_cast<long>(dv) * dv;
        const Shape ws = cfg.positionwise ? Shape{static_cast<int>(P), dv, dv} : Shape{dv, dv};
        for (const char* sub : {"ra", "rh", "rv", "rd"})
            m.params.add(pre + sub, ws, uniform(rng, wn, 0.0, 1.0) / dv);
        const double bw = 1.0 / std::sqrt(static_cast<double>(dv));
        m.params.add(pre + "w", {dv, dv}, uniform(rng, static_cast<long>(dv) * dv, -bw, bw));
        m.params.add(pre + "wb", {dv}, uniform(rng, dv, -bw, bw));
    }
    add_linear(m.params, rng, "Q1", cfg.proj_hidden, dv);
    add_linear(m.params, rng, "Q2", cfg.out_channels, cfg.proj_hidden);
    return m;
}

Var lift(Tape& t, const WnoModel& m, Var a) {
    return t.affine(t.param(m.params, "P.w"), a, t.param(m.params, "P.b"));
}

Var spectral_conv(Tape& t, const WnoModel& m, int block, Var v,
                  const std::shared_ptr<const ad::WaveletMixPlan>& plan) {
    const std::string pre = "blk" + std::to_string(block) + ".";
    return t.wavelet_mix(plan ? plan : m.plan, v,
                         {t.param(m.params, pre + "ra"), t.param(m.params, pre + "rh"),
                          t.param(m.params, pre + "rv"), t.param(m.params, pre + "rd")});
}

Var wavelet_block(Tape& t, const WnoModel& m, int block, Var v,
                  const std::shared_ptr<const ad::WaveletMixPlan>& plan) {
    const std::string pre = "blk" + std::to_string(block) + ".";
    Var s = t.add(spectral_conv(t, m, block, v, plan),
                  t.affine(t.param(m.params, pre + "w"), v, t.param(m.params, pre + "wb")));
    return block_active(m.cfg, block) ? t.gelu(s) : s;
}

Var project(Tape& t, const WnoModel& m, Var v) {
    Var h = t.gelu(t.affine(t.param(m.params, "Q1.w"), v, t.param(m.params, "Q1.b")));
    return t.affine(t.param(m.params, "Q2.w"), h, t.param(m.params, "Q2.b"));
}

Var wno_forward(ad::Tape& t, const WnoModel& m, Var a) {
    Var v = lift(t, m, a);
    for (int b = 0; b < m.cfg.blocks; ++b) v = wavelet_block(t, m, b, v);
    return project(t, m, v);
}

Var wno_forward_on(ad::Tape& t, const WnoModel& m, Var a, int rows, int cols) {
    if (rows == m.cfg.rows && cols == m.cfg.cols) return wno_forward(t, m, a);
    if (m.cfg.positionwise &&
        (coarsest_size(rows, m.cfg.levels) != coarsest_size(m.cfg.rows, m.cfg.levels) ||
         coarsest_size(cols, m.cfg.levels) != coarsest_size(m.cfg.cols, m.cfg.levels)))
        throw std::invalid_argument("wno_forward_on: positionwise weights pin the coarsest grid");
    auto plan = std::make_shared<ad::WaveletMixPlan>(*m.plan);
    plan->rows = rows;
    plan->cols = cols;
    Var v = lift(t, m, a);
    for (int b = 0; b < m.cfg.blocks; ++b) v = wavelet_block(t, m, b, v, plan);
    return project(t, m, v);
}

Eigen::ArrayXd forward_values(const WnoModel& m, std::span<const double> input) {
    Tape t;
    Var a = t.leaf({m.cfg.in_channels, m.cfg.rows * m.cfg.cols}, input);
    Var u = wno_forward(t, m, a);
    return t.t(u).values;
}

}  // namespace piwno::net
