#include "piwno/sampling.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>

#include "piwno/fft_util.hpp"

namespace piwno::data {

using std::numbers::pi;

uint64_t derive_seed(uint64_t seed, uint64_t stream) {
    // splitmix64 over the combined word
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double BurgersIc::operator()(double x) const {
    return std::cos(zeta * pi * x) + std::sin(eta * pi * x);
}

BurgersIc draw_burgers_ic(uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    BurgersIc ic;
    ic.zeta = u(rng);
    ic.eta = u(rng);
    return ic;
}

std::vector<double> sample_burgers_ic(uint64_t seed, int n) {
    const BurgersIc ic = draw_burgers_ic(seed);
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = ic(static_cast<double>(i) / (n - 1));
    return out;
}

GrfSe1d::GrfSe1d(int n, const GrfSpec& spec) : n_(n), spec_(spec) {
    if (spec.kind != GrfSpec::Kind::squared_exponential)
        throw std::invalid_argument("GrfSe1d: wrong kernel kind");
    if (spec.sigma <= 0 || spec.length <= 0)
        throw std::invalid_argument("GrfSe1d: sigma and length must be positive");
    Eigen::MatrixXd K(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            K(i, j) = kernel(static_cast<double>(i) / (n - 1),
                             static_cast<double>(j) / (n - 1));
    for (double jitter = 1e-12; jitter <= 1e-8 * 1.0001; jitter *= 10.0) {
        Eigen::LLT<Eigen::MatrixXd> llt(K + jitter * Eigen::MatrixXd::Identity(n, n));
        if (llt.info() == Eigen::Success) {
            factor_ = llt.matrixL();
            return;
        }
    }
    throw std::runtime_error("GrfSe1d: factorization failed after max jitter");
}

double GrfSe1d::kernel(double x, double y) const {
    const double d = x - y;
    return spec_.sigma * spec_.sigma *
           std::exp(-d * d / (2.0 * spec_.length * spec_.length));
}

std::vector<double> GrfSe1d::sample(uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd z(n_);
    for (int i = 0; i < n_; ++i) z[i] = gauss(rng);
    Eigen::VectorXd u = factor_ * z;
    return std::vector<double>(u.data(), u.data() + n_);
}

std::vector<double> sample_grf_se(int n, const GrfSpec& spec, uint64_t seed) {
    return GrfSe1d(n, spec).sample(seed);
}

std::vector<double> sample_grf_periodic2d(int n, const GrfSpec& spec, uint64_t seed) {
    const int m = n - 1;  // torus size
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::complex<double>> w(static_cast<size_t>(m) * m);
    for (auto& v : w) v = gauss(rng);

    fftu::Fft2 fft(m);
    fft.forward(w);
    for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
            const double k2 = static_cast<double>(fftu::freq(a, m)) * fftu::freq(a, m) +
                              static_cast<double>(fftu::freq(b, m)) * fftu::freq(b, m);
            const double sd = std::pow(spec.tau, spec.alpha_k - 1.0) *
                              std::pow(4.0 * pi * pi * k2 + spec.tau * spec.tau,
                                       -spec.alpha_k / 2.0);
            w[static_cast<size_t>(a) * m + b] *= sd / m;
        }
    }
    fft.inverse(w);

    std::vector<double> out(static_cast<size_t>(n) * n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            out[static_cast<size_t>(i) * n + j] = w[static_cast<size_t>(i) * m + j].real();
    for (int i = 0; i < n; ++i) out[static_cast<size_t>(i) * n + m] = out[static_cast<size_t>(i) * n];
    for (int j = 0; j < n; ++j) out[static_cast<size_t>(m) * n + j] = out[j];
    return out;
}

PoissonPair sample_poisson_pair(double alpha, double beta, int n) {
    if (!std::isfinite(alpha) || !std::isfinite(beta))
        throw std::invalid_argument("sample_poisson_pair: non-finite coefficients");
    PoissonPair p;
    p.alpha = alpha;
    p.beta = beta;
    p.f.resize(static_cast<size_t>(n) * n);
    p.u.resize(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        const double y = -1.0 + 2.0 * i / (n - 1);
        for (int j = 0; j < n; ++j) {
            const double x = -1.0 + 2.0 * j / (n - 1);
            p.u[static_cast<size_t>(i) * n + j] =
                alpha * std::sin(pi * x) * (1.0 + std::cos(pi * y)) +
                beta * std::sin(2.0 * pi * x) * (1.0 - std::cos(2.0 * pi * y));
            p.f[static_cast<size_t>(i) * n + j] =
                -alpha * pi * pi * std::sin(pi * x) * (1.0 + 2.0 * std::cos(pi * y)) +
                4.0 * beta * pi * pi * std::sin(2.0 * pi * x) *
                    (2.0 * std::cos(2.0 * pi * y) - 1.0);
        }
    }
    return p;
}

PoissonPair draw_poisson_pair(uint64_t seed, int n) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const double alpha = u(rng), beta = u(rng);
    return sample_poisson_pair(alpha, beta, n);
}

}  // namespace piwno::data
