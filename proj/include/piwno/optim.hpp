#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

namespace piwno::ad {

using Shape = std::vector<int>;

inline long numel(const Shape& s) {
    long n = 1;
    for (int d : s) n *= d;
    return n;
}

struct OptimConfig {
    double lr0 = 1e-3;
    double weight_decay = 1e-6;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    double decay_factor = 0.75;
    int decay_every = 50;
};

/// Step-decay schedule: lr0 * decay_factor^floor(epoch / decay_every).
double lr_at(int epoch, const OptimConfig& cfg);

struct Param {
    Shape shape;
    Eigen::ArrayXd value;
    Eigen::ArrayXd m, v;  // adam moments, shape-matched
};

/// Named parameter set with Adam state. Single-writer during optimization;
/// concurrent reads during forward/backward are fine.
class ParamStore {
public:
    void add(const std::string& name, Shape shape, Eigen::ArrayXd init);
    Param& at(const std::string& name);
    const Param& at(const std::string& name) const;
    bool contains(const std::string& name) const { return p_.count(name) > 0; }
    const std::map<std::string, Param>& all() const { return p_; }
    std::map<std::string, Param>& all() { return p_; }
    long step() const { return step_; }
    void set_step(long s) { step_ = s; }
    long total_values() const;

    friend void adam_step(ParamStore&, const std::map<std::string, Eigen::ArrayXd>&,
                          double, const OptimConfig&);

private:
    std::map<std::string, Param> p_;
    long step_ = 0;
};

using GradMap = std::map<std::string, Eigen::ArrayXd>;

/// One Adam update with decoupled weight decay (theta -= lr*wd*theta before
/// the moment-based step). Throws on non-finite gradient entries.
void adam_step(ParamStore& store, const GradMap& grads, double lr,
               const OptimConfig& cfg);

}  // namespace piwno::ad
