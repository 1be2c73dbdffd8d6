#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace piwno::data {

/// Stream-split hash so per-sample draws are independent of sample order.
uint64_t derive_seed(uint64_t seed, uint64_t stream);

struct GrfSpec {
    enum class Kind { squared_exponential, periodic_spectral };
    Kind kind = Kind::squared_exponential;
    double sigma = 0.1, length = 0.1;  // SE kernel
    double tau = 15.0, alpha_k = 1.0;  // spectral kernel
};

// -- parametric initial conditions ------------------------------------------

struct BurgersIc {
    double zeta, eta;
    double operator()(double x) const;
};
/// zeta, eta ~ Unif(0.5, 1.5).
BurgersIc draw_burgers_ic(uint64_t seed);
/// cos(zeta pi x) + sin(eta pi x) on n uniform points of [0,1].
std::vector<double> sample_burgers_ic(uint64_t seed, int n = 81);

// -- Gaussian random fields --------------------------------------------------

/// Dense SE-kernel factorization on n points of [0,1], with a diagonal
/// jitter ladder 1e-12 .. 1e-8. Reusable across draws.
class GrfSe1d {
public:
    GrfSe1d(int n, const GrfSpec& spec);
    std::vector<double> sample(uint64_t seed) const;
    double kernel(double x, double y) const;

private:
    int n_;
    GrfSpec spec_;
    Eigen::MatrixXd factor_;  // lower Cholesky factor
};
std::vector<double> sample_grf_se(int n, const GrfSpec& spec, uint64_t seed);

/// Periodic GRF on the (n-1)^2 torus, emitted n x n with the wrap row/column
/// duplicated. Mode standard deviation tau^(alpha-1) (4 pi^2 |k|^2 + tau^2)^(-alpha/2).
std::vector<double> sample_grf_periodic2d(int n, const GrfSpec& spec, uint64_t seed);

// -- analytic Poisson pairs ---------------------------------------------------

struct PoissonPair {
    double alpha, beta;
    std::vector<double> f, u;  // row-major over (y, x), n x n on [-1,1]^2
};
/// u = alpha sin(pi x)(1 + cos(pi y)) + beta sin(2 pi x)(1 - cos(2 pi y));
/// f is its exact Laplacian.
PoissonPair sample_poisson_pair(double alpha, double beta, int n = 65);
/// alpha, beta ~ Unif(-2, 2).
PoissonPair draw_poisson_pair(uint64_t seed, int n = 65);

}  // namespace piwno::data
