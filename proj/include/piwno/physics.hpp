#pragma once

#include <memory>
#include <string>

#include "piwno/autodiff.hpp"
#include "piwno/spgrad.hpp"

namespace piwno::phys {

enum class ProblemId { burgers, nagumo, poisson, allen_cahn };
enum class TrainMode { physics, data, hybrid };

ProblemId problem_from_name(const std::string& name);
std::string to_string(ProblemId id);
TrainMode mode_from_name(const std::string& name);
std::string to_string(TrainMode m);

/// One benchmark PDE: residual definition, domain, boundary/initial
/// conditions, channel encoding, and physical parameters. Fields are
/// row-major over (axis0, axis1) where axis0 is t (spatiotemporal problems)
/// or y (spatial ones).
struct ProblemSpec {
    ProblemId id = ProblemId::poisson;
    int n0 = 65, n1 = 65;
    double lo0 = 0.0, hi0 = 1.0, lo1 = 0.0, hi1 = 1.0;

    double nu = 0.1;        // burgers viscosity
    double eps = 1.0;       // nagumo / allen-cahn diffusion coefficient
    double alpha = -0.5;    // nagumo reaction root
    double dt_frames = 1.0; // allen-cahn frame spacing (s)
    int frames_in = 10, frames_out = 10;

    int in_channels = 3, out_channels = 1;
    double w_bc = 10.0, w_ic = 10.0, w_data = 1.0;

    /// Boundary treatment switch for the spatial axis; the equation-block
    /// Dirichlet values are the default, periodic is selectable.
    std::string bc_kind = "dirichlet";
    sp::StencilConfig stencil;

    double h0() const { return (hi0 - lo0) / (n0 - 1); }
    double h1() const { return (hi1 - lo1) / (n1 - 1); }
    int points() const { return n0 * n1; }
    bool periodic() const { return id == ProblemId::allen_cahn || bc_kind == "periodic"; }

    static ProblemSpec burgers();
    static ProblemSpec nagumo();
    static ProblemSpec poisson();
    static ProblemSpec allen_cahn();
    static ProblemSpec by_id(ProblemId id);
};

/// Fixed operators and index sets for one problem grid: SP derivative maps,
/// the residual collocation mask (interior inset per derivative order), and
/// boundary/initial index lists.
struct PhysicsContext {
    ProblemSpec spec;
    sp::StencilSet stencils;
    std::shared_ptr<SparseMap> d0, d1;    // first derivative per axis
    std::shared_ptr<SparseMap> d00, d11;  // composed second derivatives
    std::shared_ptr<SparseMap> laplace;   // d00 + d11
    std::shared_ptr<const Eigen::MatrixXd> dt_stack;  // time derivative across frames
    std::shared_ptr<const std::vector<int>> mask;
    std::shared_ptr<const std::vector<int>> bc_idx;
    std::shared_ptr<const std::vector<int>> ic_idx;
    std::shared_ptr<const std::vector<int>> wrap_lo, wrap_hi;  // periodic pairing
};

PhysicsContext make_context(const ProblemSpec& spec);

// -- residuals -------------------------------------------------------------

/// r = D_t u + 1/2 D_x(u^2) - nu D_xx u (conservative form).
ad::Var residual_burgers(ad::Tape& t, const PhysicsContext& ctx, ad::Var u);
/// r = D_t u - eps D_xx u - u(1-u)(u-alpha).
ad::Var residual_nagumo(ad::Tape& t, const PhysicsContext& ctx, ad::Var u);
/// r = D_xx u + D_yy u - f.
ad::Var residual_poisson(ad::Tape& t, const PhysicsContext& ctx, ad::Var u, ad::Var f);
/// r = D_t u - eps Lap u - u + u^3 over the stacked output frames, with the
/// final conditioning frame prepended for the one-sided first step.
ad::Var residual_allen_cahn(ad::Tape& t, const PhysicsContext& ctx, ad::Var u_out,
                            ad::Var u_last_in);

// -- losses ----------------------------------------------------------------

/// Mean squared residual over the collocation mask.
ad::Var loss_pde(ad::Tape& t, const PhysicsContext& ctx, ad::Var r);
/// Mean squared boundary mismatch: Dirichlet lines against zero targets, or
/// the periodic wrap-pair mismatch.
ad::Var loss_bc(ad::Tape& t, const PhysicsContext& ctx, ad::Var u);
/// Mean squared initial-condition mismatch on the t=0 line.
ad::Var loss_ic(ad::Tape& t, const PhysicsContext& ctx, ad::Var u, ad::Var target);
/// Mean squared error against a labeled solution.
ad::Var loss_data(ad::Tape& t, ad::Var u, ad::Var truth);

/// Mode-weighted composite; invalid component handles contribute nothing.
ad::Var total_loss(ad::Tape& t, const ProblemSpec& spec, TrainMode mode, ad::Var pde,
                   ad::Var bc, ad::Var ic, ad::Var data);

struct LossBreakdown {
    double pde = 0, bc = 0, ic = 0, data = 0, total = 0;
};

LossBreakdown breakdown(const ad::Tape& t, ad::Var pde, ad::Var bc, ad::Var ic,
                        ad::Var data, ad::Var total);

}  // namespace piwno::phys
