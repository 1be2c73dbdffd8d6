#pragma once

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "piwno/optim.hpp"
#include "piwno/sparse_map.hpp"
#include "piwno/wavelet.hpp"

namespace piwno::ad {

/// Dense tensor participating in one fixed forward graph. Fields beyond
/// value/grad live on the owning graph node. Channel fields use shape
/// {channels, points}; scalars use shape {1}.
struct DiffTensor {
    Shape shape;
    Eigen::ArrayXd values;
    Eigen::ArrayXd grad;  // empty until backward
    bool requires_grad = false;
};

enum class Op : uint8_t {
    leaf,
    add,
    sub,
    mul,
    scale,
    gelu,
    mean,
    gather,
    concat,
    affine,
    affine_const,
    sparse_apply,
    wavelet_mix,
};

/// Shared description of one wavelet kernel-integration site: grid shape,
/// basis, depth, and whether mixing weights are per coefficient position.
struct WaveletMixPlan {
    std::shared_ptr<const wavelet::WaveletBasis> basis;
    int rows = 0, cols = 0, levels = 1;
    bool positionwise = false;
};

/// Handle into a Tape.
struct Var {
    int id = -1;
    bool valid() const { return id >= 0; }
};

/// Reverse-mode graph over the fixed operation set the operator network
/// needs. One tape per forward/backward pass; tapes are not thread-safe but
/// independent tapes may run in parallel against a read-only ParamStore.
class Tape {
public:
    Var leaf(Shape shape, std::span<const double> values, bool requires_grad = false);
    Var zeros(Shape shape, bool requires_grad = false);
    /// Leaf bound to a named parameter; its gradient lands in the GradMap.
    Var param(const ParamStore& store, const std::string& name);

    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);
    Var scale(Var a, double c);
    Var square(Var a) { return mul(a, a); }
    Var gelu(Var a);
    Var mean(Var a);
    /// Column selection on a {C, N} tensor: result {C, idx.size()}.
    Var gather(Var a, std::shared_ptr<const std::vector<int>> idx);
    /// Channel concatenation: {Ca, N} + {Cb, N} -> {Ca+Cb, N}.
    Var concat(Var a, Var b);
    /// w {Cout, Cin} * x {Cin, N} + optional bias {Cout}.
    Var affine(Var w, Var x, Var b = Var{});
    /// Fixed matrix applied across channels.
    Var affine_const(std::shared_ptr<const Eigen::MatrixXd> m, Var x);
    /// S applied to every channel row of x {C, N}.
    Var sparse_apply(std::shared_ptr<const SparseMap> s, Var x);
    /// Wavelet-domain kernel application: per channel forward DWT, learned
    /// channel mixing on the four coarsest subbands (weights a,lh,hl,hh),
    /// finer details passed through, inverse DWT.
    Var wavelet_mix(std::shared_ptr<const WaveletMixPlan> plan, Var x,
                    std::array<Var, 4> weights);

    /// Reverse pass from a scalar loss. Returns gradients for every
    /// parameter leaf registered via param(); disconnected parameters get
    /// zeros.
    GradMap backward(Var loss);

    const DiffTensor& t(Var v) const { return nodes_[v.id].t; }
    double scalar(Var v) const;
    int size() const { return static_cast<int>(nodes_.size()); }
    void clear();

private:
    struct WMixCache {
        Eigen::MatrixXd sub[4];  // input coarsest subbands, {C, P} each
    };
    struct Node {
        DiffTensor t;
        Op op = Op::leaf;
        std::array<int, 5> in{-1, -1, -1, -1, -1};
        int n_in = 0;
        double c = 0.0;
        std::shared_ptr<const Eigen::MatrixXd> cmat;
        std::shared_ptr<const SparseMap> smap;
        std::shared_ptr<const std::vector<int>> idx;
        std::shared_ptr<const WaveletMixPlan> plan;
        std::unique_ptr<WMixCache> wcache;
    };

    int push(Node n);
    Node& node(Var v) { return nodes_[v.id]; }
    void check_finite(int id) const;
    void backward_node(int id);

    std::vector<Node> nodes_;
    std::vector<std::pair<std::string, int>> params_;  // name -> leaf node
};

}  // namespace piwno::ad
