#include "piwno/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace piwno::ad {

double lr_at(int epoch, const OptimConfig& cfg) {
    if (epoch < 0) throw std::invalid_argument("lr_at: negative epoch");
    return cfg.lr0 * std::pow(cfg.decay_factor, epoch / cfg.decay_every);
}

void ParamStore::add(const std::string& name, Shape shape, Eigen::ArrayXd init) {
    if (p_.count(name)) throw std::invalid_argument("ParamStore: duplicate name " + name);
    if (numel(shape) != init.size())
        throw std::invalid_argument("ParamStore: shape/value mismatch for " + name);
    Param p;
    p.shape = std::move(shape);
    p.m = Eigen::ArrayXd::Zero(init.size());
    p.v = Eigen::ArrayXd::Zero(init.size());
    p.value = std::move(init);
    p_.emplace(name, std::move(p));
}

Param& ParamStore::at(const std::string& name) {
    auto it = p_.find(name);
    if (it == p_.end()) throw std::invalid_argument("ParamStore: unknown name " + name);
    return it->second;
}

const Param& ParamStore::at(const std::string& name) const {
    auto it = p_.find(name);
    if (it == p_.end()) throw std::invalid_argument("ParamStore: unknown name " + name);
    return it->second;
}

long ParamStore::total_values() const {
    long n = 0;
    for (const auto& [k, p] : p_) n += p.value.size();
    return n;
}

void adam_step(ParamStore& store, const GradMap& grads, double lr,
               const OptimConfig& cfg) {
    if (lr <= 0) throw std::invalid_argument("adam_step: lr must be positive");
    store.step_ += 1;
    const double t = static_cast<double>(store.step_);
    const double bc1 = 1.0 - std::pow(cfg.beta1, t);
    const double bc2 = 1.0 - std::pow(cfg.beta2, t);
    for (auto& [name, p] : store.p_) {
        auto it = grads.find(name);
        if (it == grads.end()) continue;
        const Eigen::ArrayXd& g = it->second;
        if (g.size() != p.value.size())
            throw std::invalid_argument("adam_step: gradient shape mismatch for " + name);
        if (!g.allFinite())
            throw std::runtime_error("adam_step: non-finite gradient for " + name);
        if (cfg.weight_decay != 0.0) p.value -= lr * cfg.weight_decay * p.value;
        p.m = cfg.beta1 * p.m + (1.0 - cfg.beta1) * g;
        p.v = cfg.beta2 * p.v + (1.0 - cfg.beta2) * g.square();
        p.value -= lr * (p.m / bc1) / ((p.v / bc2).sqrt() + cfg.eps);
    }
}

}  // namespace piwno::ad
