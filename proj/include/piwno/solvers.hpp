#pragma once

#include <span>
#include <vector>

namespace piwno::data {

/// Viscous Burgers on [0,1] with homogeneous Dirichlet ends, method of
/// lines: second-order central differences on nx_int points, Crank-Nicolson
/// diffusion with Adams-Bashforth advection, advective CFL substeps.
/// u0_int is the initial condition on the internal grid; the result is the
/// restriction to [nt_out x nx_out] over t in [0,1]. nx_int must nest the
/// output grid.
std::vector<double> solve_burgers(std::span<const double> u0_int, double nu,
                                  int nx_out = 81, int nt_out = 81, int nx_int = 641,
                                  double cfl = 0.4);

/// Nagumo reaction-diffusion, semi-implicit Euler (diffusion implicit,
/// cubic reaction explicit), centered differences, Dirichlet ends.
std::vector<double> solve_nagumo(std::span<const double> u0_int, double eps,
                                 double alpha, int nx_out = 65, int nt_out = 65,
                                 int nx_int = 257, int substeps = 8);

/// Allen-Cahn on the periodic unit square, Fourier-Galerkin with the linear
/// part implicit in frequency space and the cubic term explicit. u0 lives on
/// the m x m torus; frames are emitted wrap-augmented as (m+1) x (m+1) at
/// t = 0, dt_frame, ..., (n_frames-1) dt_frame.
std::vector<double> solve_allen_cahn(std::span<const double> u0_torus, int m, double eps,
                                     int n_frames = 21, double dt_frame = 1.0,
                                     int substeps_per_frame = 50);

}  // namespace piwno::data
