#pragma once

#include <memory>
#include <string>

#include "piwno/autodiff.hpp"

namespace piwno::net {

struct WnoConfig {
    int in_channels = 3;   // d_a encoding width
    int out_channels = 1;
    int lift_dim = 64;     // d_v, number of kernels
    int blocks = 4;        // kernel-integration iterations
    std::string basis = "db4";
    int levels = 3;        // wavelet decomposition depth
    std::string activation = "gelu";  // "gelu" | "identity"
    int rows = 0, cols = 0;           // grid shape
    int proj_hidden = 128;
    bool positionwise = false;  // per-position mixing weights instead of shared
    /// Optional per-block activation switches; empty means all blocks except
    /// the final one use cfg.activation. The final block is always linear.
    std::vector<uint8_t> block_activation;
};

/// Full parameter set of one wavelet neural operator: lifting P, per block a
/// residual pointwise map W and four coarsest-subband mixing tensors, and a
/// two-stage projection Q.
struct WnoModel {
    WnoConfig cfg;
    ad::ParamStore params;
    std::shared_ptr<const wavelet::WaveletBasis> basis;
    std::shared_ptr<const ad::WaveletMixPlan> plan;  // for the configured grid

    long param_count() const { return params.total_values(); }
};

/// Coarsest-subband edge length after `levels` halvings (with padding).
int coarsest_size(int n, int levels);

/// Deterministic seeded initialization. Pointwise linears draw from
/// U(-1/sqrt(fan_in), 1/sqrt(fan_in)); mixing tensors from (1/d_v)*U(0,1).
WnoModel init_model(const WnoConfig& cfg, uint64_t seed);

ad::Var lift(ad::Tape& t, const WnoModel& m, ad::Var a);
ad::Var spectral_conv(ad::Tape& t, const WnoModel& m, int block, ad::Var v,
                      const std::shared_ptr<const ad::WaveletMixPlan>& plan = nullptr);
ad::Var wavelet_block(ad::Tape& t, const WnoModel& m, int block, ad::Var v,
                      const std::shared_ptr<const ad::WaveletMixPlan>& plan = nullptr);
ad::Var project(ad::Tape& t, const WnoModel& m, ad::Var v);

/// Whole pipeline Q(block_l(...block_1(P(a)))) on the configured grid.
ad::Var wno_forward(ad::Tape& t, const WnoModel& m, ad::Var a);
/// Same parameters on another grid (position-shared mixing only).
ad::Var wno_forward_on(ad::Tape& t, const WnoModel& m, ad::Var a, int rows, int cols);

/// Plain forward pass without building gradients (evaluation path).
Eigen::ArrayXd forward_values(const WnoModel& m, std::span<const double> input);

}  // namespace piwno::net
