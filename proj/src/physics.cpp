#include "piwno/physics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace piwno::phys {

using ad::Tape;
using ad::Var;

ProblemId problem_from_name(const std::string& name) {
    if (name == "burgers") return ProblemId::burgers;
    if (name == "nagumo") return ProblemId::nagumo;
    if (name == "poisson") return ProblemId::poisson;
    if (name == "allen-cahn" || name == "allen_cahn") return ProblemId::allen_cahn;
    throw std::invalid_argument("unknown problem '" + name + "'");
}

std::string to_string(ProblemId id) {
    switch (id) {
        case ProblemId::burgers: return "burgers";
        case ProblemId::nagumo: return "nagumo";
        case ProblemId::poisson: return "poisson";
        case ProblemId::allen_cahn: return "allen-cahn";
    }
    return "?";
}

TrainMode mode_from_name(const std::string& name) {
    if (name == "physics") return TrainMode::physics;
    if (name == "data") return TrainMode::data;
    if (name == "hybrid") return TrainMode::hybrid;
    throw std::invalid_argument("unknown mode '" + name + "' (physics|data|hybrid)");
}

std::string to_string(TrainMode m) {
    switch (m) {
        case TrainMode::physics: return "physics";
        case TrainMode::data: return "data";
        case TrainMode::hybrid: return "hybrid";
    }
    return "?";
}

ProblemSpec ProblemSpec::burgers() {
    ProblemSpec s;
    s.id = ProblemId::burgers;
    s.n0 = 81;  // t
    s.n1 = 81;  // x
    s.nu = 0.1;
    s.in_channels = 3;  // u0, x, t
    s.out_channels = 1;
    return s;
}

ProblemSpec ProblemSpec::nagumo() {
    ProblemSpec s;
    s.id = ProblemId::nagumo;
    s.n0 = 65;
    s.n1 = 65;
    s.eps = 1.0;
    s.alpha = -0.5;
    s.in_channels = 3;
    s.out_channels = 1;
    return s;
}

ProblemSpec ProblemSpec::poisson() {
    ProblemSpec s;
    s.id = ProblemId::poisson;
    s.n0 = 65;
    s.n1 = 65;
    s.lo0 = -1.0;
    s.lo1 = -1.0;
    s.in_channels = 3;  // f, x, y
    s.out_channels = 1;
    return s;
}

ProblemSpec ProblemSpec::allen_cahn() {
    ProblemSpec s;
    s.id = ProblemId::allen_cahn;
    s.n0 = 65;
    s.n1 = 65;
    s.eps = 1e-3;
    s.dt_frames = 1.0;
    s.frames_in = 10;
    s.frames_out = 10;
    s.in_channels = 12;  // ten conditioning frames plus x, y
    s.out_channels = 10;
    s.w_bc = 10.0;
    return s;
}

ProblemSpec ProblemSpec::by_id(ProblemId id) {
    switch (id) {
        case ProblemId::burgers: return burgers();
        case ProblemId::nagumo: return nagumo();
        case ProblemId::poisson: return poisson();
        case ProblemId::allen_cahn: return allen_cahn();
    }
    throw std::invalid_argument("by_id: bad problem");
}

namespace {

// Residual collocation mask: inset per axis by (stencil radius) x (highest
// derivative order along that axis); periodic axes keep every point.
std::vector<int> interior_mask(const ProblemSpec& s, int order0, int order1) {
    const int R = static_cast<int>(std::floor(s.stencil.radius + 1e-12));
    const bool per = s.periodic();
    const int in0 = per ? 0 : R * order0;
    const int in1 = per ? 0 : R * order1;
    std::vector<int> idx;
    for (int i = in0; i < s.n0 - in0; ++i)
        for (int j = in1; j < s.n1 - in1; ++j) idx.push_back(i * s.n1 + j);
    if (idx.empty()) throw std::invalid_argument("interior_mask: grid too small");
    return idx;
}

}  // namespace

PhysicsContext make_context(const ProblemSpec& spec) {
    PhysicsContext ctx;
    ctx.spec = spec;

    sp::GridSpec grid{spec.n0, spec.n1, spec.h0(), spec.h1(), false, false};
    if (spec.id == ProblemId::allen_cahn) {
        grid.periodic0 = grid.periodic1 = true;
    } else if (spec.bc_kind == "periodic") {
        grid.periodic1 = true;  // spatial axis of the (t, x) problems
        if (spec.id == ProblemId::poisson) grid.periodic0 = true;
    }
    ctx.stencils = sp::build_stencil(grid, spec.stencil);
    ctx.d0 = sp::as_linear_map(ctx.stencils, 1, 0);
    ctx.d1 = sp::as_linear_map(ctx.stencils, 1, 1);
    ctx.d00 = sp::as_linear_map(ctx.stencils, 2, 0);
    ctx.d11 = sp::as_linear_map(ctx.stencils, 2, 1);
    {
        SparseMap::Mat lap = ctx.d00->matrix() + ctx.d11->matrix();
        sp::zero_row_sums(lap);
        ctx.laplace = std::make_shared<SparseMap>(std::move(lap));
    }

    const int n0 = spec.n0, n1 = spec.n1;
    auto bc = std::make_shared<std::vector<int>>();
    auto ic = std::make_shared<std::vector<int>>();
    switch (spec.id) {
        case ProblemId::burgers:
        case ProblemId::nagumo: {
            ctx.mask = std::make_shared<const std::vector<int>>(interior_mask(spec, 1, 2));
            for (int i = 0; i < n0; ++i) {
                bc->push_back(i * n1);
                bc->push_back(i * n1 + n1 - 1);
            }
            for (int j = 0; j < n1; ++j) ic->push_back(j);
            break;
        }
        case ProblemId::poisson: {
            ctx.mask = std::make_shared<const std::vector<int>>(interior_mask(spec, 2, 2));
            for (int j = 0; j < n1; ++j) {
                bc->push_back(j);
                bc->push_back((n0 - 1) * n1 + j);
            }
            for (int i = 1; i < n0 - 1; ++i) {
                bc->push_back(i * n1);
                bc->push_back(i * n1 + n1 - 1);
            }
            break;
        }
        case ProblemId::allen_cahn: {
            ctx.mask = std::make_shared<const std::vector<int>>(interior_mask(spec, 0, 0));
            auto lo = std::make_shared<std::vector<int>>();
            auto hi = std::make_shared<std::vector<int>>();
            for (int i = 0; i < n0; ++i) {
                lo->push_back(i * n1);
                hi->push_back(i * n1 + n1 - 1);
            }
            for (int j = 0; j < n1; ++j) {
                lo->push_back(j);
                hi->push_back((n0 - 1) * n1 + j);
            }
            ctx.wrap_lo = lo;
            ctx.wrap_hi = hi;

            // time derivative over (1 + frames_out) stacked frames
            sp::GridSpec tg{spec.frames_out + 1, 1, spec.dt_frames, 1.0};
            auto ts = sp::build_stencil(tg, spec.stencil);
            Eigen::MatrixXd dense = Eigen::MatrixXd(ts.d_axis[0]->matrix());
            auto dt = std::make_shared<Eigen::MatrixXd>(
                dense.bottomRows(spec.frames_out));  // rows for the output frames
            ctx.dt_stack = dt;
            break;
        }
    }
    ctx.bc_idx = bc;
    ctx.ic_idx = ic;
    return ctx;
}

Var residual_burgers(Tape& t, const PhysicsContext& ctx, Var u) {
    const auto& s = ctx.spec;
    if (t.t(u).shape != ad::Shape{1, s.points()})
        throw std::invalid_argument("residual_burgers: field shape mismatch");
    Var ut = t.sparse_apply(ctx.d0, u);
    Var flux = t.scale(t.sparse_apply(ctx.d1, t.square(u)), 0.5);
    Var diff = t.scale(t.sparse_apply(ctx.d11, u), s.nu);
    return t.sub(t.add(ut, flux), diff);
}

Var residual_nagumo(Tape& t, const PhysicsContext& ctx, Var u) {
    const auto& s = ctx.spec;
    if (t.t(u).shape != ad::Shape{1, s.points()})
        throw std::invalid_argument("residual_nagumo: field shape mismatch");
    Var ut = t.sparse_apply(ctx.d0, u);
    Var diff = t.scale(t.sparse_apply(ctx.d11, u), s.eps);
    std::vector<double> ones(s.points(), 1.0), al(s.points(), s.alpha);
    Var one = t.leaf({1, s.points()}, ones);
    Var alpha = t.leaf({1, s.points()}, al);
    Var reaction = t.mul(t.mul(u, t.sub(one, u)), t.sub(u, alpha));
    return t.sub(t.sub(ut, diff), reaction);
}

Var residual_poisson(Tape& t, const PhysicsContext& ctx, Var u, Var f) {
    const auto& s = ctx.spec;
    if (t.t(u).shape != ad::Shape{1, s.points()})
        throw std::invalid_argument("residual_poisson: field shape mismatch");
    return t.sub(t.sparse_apply(ctx.laplace, u), f);
}

Var residual_allen_cahn(Tape& t, const PhysicsContext& ctx, Var u_out, Var u_last_in) {
    const auto& s = ctx.spec;
    if (t.t(u_out).shape != ad::Shape{s.frames_out, s.points()})
        throw std::invalid_argument("residual_allen_cahn: stack shape mismatch");
    if (t.t(u_last_in).shape != ad::Shape{1, s.points()})
        throw std::invalid_argument("residual_allen_cahn: conditioning frame shape mismatch");
    Var stack = t.concat(u_last_in, u_out);
    Var ut = t.affine_const(ctx.dt_stack, stack);
    Var lap = t.scale(t.sparse_apply(ctx.laplace, u_out), s.eps);
    Var cube = t.mul(t.mul(u_out, u_out), u_out);
    return t.add(t.sub(ut, t.add(lap, u_out)), cube);
}

Var loss_pde(Tape& t, const PhysicsContext& ctx, Var r) {
    return t.mean(t.square(t.gather(r, ctx.mask)));
}

Var loss_bc(Tape& t, const PhysicsContext& ctx, Var u) {
    if (ctx.wrap_lo) {
        Var lo = t.gather(u, ctx.wrap_lo);
        Var hi = t.gather(u, ctx.wrap_hi);
        return t.mean(t.square(t.sub(lo, hi)));
    }
    return t.mean(t.square(t.gather(u, ctx.bc_idx)));
}

Var loss_ic(Tape& t, const PhysicsContext& ctx, Var u, Var target) {
    return t.mean(t.square(t.sub(t.gather(u, ctx.ic_idx), target)));
}

Var loss_data(Tape& t, Var u, Var truth) {
    return t.mean(t.square(t.sub(u, truth)));
}

Var total_loss(Tape& t, const ProblemSpec& spec, TrainMode mode, Var pde, Var bc,
               Var ic, Var data) {
    auto acc = [&](Var sum, Var term, double w) {
        if (!term.valid() || w == 0.0) return sum;
        Var wt = (w == 1.0) ? term : t.scale(term, w);
        return sum.valid() ? t.add(sum, wt) : wt;
    };
    Var total{};
    if (mode != TrainMode::data) {
        total = acc(total, pde, 1.0);
        total = acc(total, bc, spec.w_bc);
        total = acc(total, ic, spec.w_ic);
    }
    if (mode != TrainMode::physics) total = acc(total, data, spec.w_data);
    if (!total.valid()) throw std::invalid_argument("total_loss: no active components");
    return total;
}

LossBreakdown breakdown(const Tape& t, Var pde, Var bc, Var ic, Var data, Var total) {
    LossBreakdown b;
    if (pde.valid()) b.pde = t.scalar(pde);
    if (bc.valid()) b.bc = t.scalar(bc);
    if (ic.valid()) b.ic = t.scalar(ic);
    if (data.valid()) b.data = t.scalar(data);
    if (total.valid()) b.total = t.scalar(total);
    return b;
}

}  // namespace piwno::phys
