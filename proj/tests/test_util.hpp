#pragma once

#include <doctest.h>

#include <functional>
#include <limits>
#include <random>

#include "piwno/autodiff.hpp"

namespace piwno::testutil {

inline Eigen::ArrayXd randu(long n, uint64_t seed, double lo = -1.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(lo, hi);
    Eigen::ArrayXd a(n);
    for (long i = 0; i < n; ++i) a[i] = d(rng);
    return a;
}

inline ad::Var leafv(ad::Tape& t, ad::Shape s, const Eigen::ArrayXd& a,
                     bool requires_grad = false) {
    return t.leaf(std::move(s), std::span<const double>(a.data(), a.size()), requires_grad);
}

/// Central finite differences against the reverse-mode gradient for every
/// entry of every parameter in the store. `run` rebuilds the forward pass on
/// a fresh tape and returns the scalar loss; when `g` is non-null it also
/// runs backward.
inline void fd_check(ad::ParamStore& store,
                     const std::function<double(ad::Tape&, ad::ParamStore&, ad::GradMap*)>& run,
                     double tol = 1e-5, double h = 1e-6, int stride = 1) {
    ad::Tape tape;
    ad::GradMap grads;
    run(tape, store, &grads);
    for (auto& [name, p] : store.all()) {
        for (long i = 0; i < p.value.size(); i += stride) {
            const double keep = p.value[i];
            p.value[i] = keep + h;
            ad::Tape tp;
            const double lp = run(tp, store, nullptr);
            p.value[i] = keep - h;
            ad::Tape tm;
            const double lm = run(tm, store, nullptr);
            p.value[i] = keep;
            const double fd = (lp - lm) / (2.0 * h);
            const auto git = grads.find(name);
            const double ad_g = (git == grads.end()) ? 0.0 : git->second[i];
            const double rel =
                std::abs(ad_g - fd) / std::max({std::abs(ad_g), std::abs(fd), 1e-6});
            // the FD oracle itself carries cancellation noise ~ eps*|L|/h
            const double fd_noise = 64.0 * std::numeric_limits<double>::epsilon() *
                                    std::max({std::abs(lp), std::abs(lm), 1.0}) / (2.0 * h);
            const bool ok = rel <= tol || std::abs(ad_g - fd) <= fd_noise;
            CHECK_MESSAGE(ok, name, "[", i, "] ad=", ad_g, " fd=", fd);
        }
    }
}

}  // namespace piwno::testutil
