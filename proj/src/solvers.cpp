#include "piwno/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "piwno/fft_util.hpp"

namespace piwno::data {

namespace {

using std::numbers::pi;

// Constant-coefficient tridiagonal solve (Thomas), system size n.
void thomas_const(double diag, double off, std::vector<double>& d,
                  std::vector<double>& scratch) {
    const size_t n = d.size();
    scratch.resize(n);
    scratch[0] = off / diag;
    d[0] /= diag;
    for (size_t i = 1; i < n; ++i) {
        const double m = 1.0 / (diag - off * scratch[i - 1]);
        scratch[i] = off * m;
        d[i] = (d[i] - off * d[i - 1]) * m;
    }
    for (size_t i = n - 1; i-- > 0;) d[i] -= scratch[i] * d[i + 1];
}

void restrict_row(const std::vector<double>& fine, int stride, double* out, int nx_out) {
    for (int j = 0; j < nx_out; ++j) out[j] = fine[static_cast<size_t>(j) * stride];
}

int check_nesting(size_t n_int, int nx_out) {
    const int nx = static_cast<int>(n_int);
    if ((nx - 1) % (nx_out - 1) != 0)
        throw std::invalid_argument("solver: internal grid must nest the output grid");
    return (nx - 1) / (nx_out - 1);
}

}  // namespace

std::vector<double> solve_burgers(std::span<const double> u0_int, double nu, int nx_out,
                                  int nt_out, int nx_int, double cfl) {
    if (static_cast<int>(u0_int.size()) != nx_int)
        throw std::invalid_argument("solve_burgers: u0 must live on the internal grid");
    const int stride = check_nesting(u0_int.size(), nx_out);
    const int nx = nx_int;
    const double h = 1.0 / (nx - 1);
    const double dt_out = 1.0 / (nt_out - 1);

    double umax = 1.0;
    for (double v : u0_int) umax = std::max(umax, std::abs(v));
    const int substeps = std::max(1, static_cast<int>(std::ceil(dt_out / (cfl * h / umax))));
    const double dt = dt_out / substeps;

    std::vector<double> u(u0_int.begin(), u0_int.end());
    std::vector<double> flux_prev(nx, 0.0), flux(nx, 0.0), rhs(nx - 2), scratch;
    auto advect = [&](const std::vector<double>& v, std::vector<double>& f) {
        for (int j = 1; j < nx - 1; ++j)
            f[j] = (v[j + 1] * v[j + 1] - v[j - 1] * v[j - 1]) / (4.0 * h);
    };
    const double r = nu * dt / (2.0 * h * h);
    const double diag = 1.0 + 2.0 * r, off = -r;

    std::vector<double> out(static_cast<size_t>(nt_out) * nx_out);
    restrict_row(u, stride, out.data(), nx_out);

    bool have_prev = false;
    for (int frame = 1; frame < nt_out; ++frame) {
        for (int s = 0; s < substeps; ++s) {
            advect(u, flux);
            for (int j = 1; j < nx - 1; ++j) {
                const double lap = u[j - 1] - 2.0 * u[j] + u[j + 1];
                const double adv = have_prev ? 1.5 * flux[j] - 0.5 * flux_prev[j] : flux[j];
                rhs[j - 1] = u[j] + r * lap - dt * adv;
            }
            thomas_const(diag, off, rhs, scratch);
            std::swap(flux_prev, flux);
            have_prev = true;
            for (int j = 1; j < nx - 1; ++j) u[j] = rhs[j - 1];
            u[0] = u[nx - 1] = 0.0;  // Dirichlet ends for t > 0
        }
        restrict_row(u, stride, out.data() + static_cast<size_t>(frame) * nx_out, nx_out);
    }
    return out;
}

std::vector<double> solve_nagumo(std::span<const double> u0_int, double eps, double alpha,
                                 int nx_out, int nt_out, int nx_int, int substeps) {
    if (static_cast<int>(u0_int.size()) != nx_int)
        throw std::invalid_argument("solve_nagumo: u0 must live on the internal grid");
    const int stride = check_nesting(u0_int.size(), nx_out);
    const int nx = nx_int;
    const double h = 1.0 / (nx - 1);
    const double dt = 1.0 / ((nt_out - 1) * substeps);

    const double r = eps * dt / (h * h);
    const double diag = 1.0 + 2.0 * r, off = -r;

    std::vector<double> u(u0_int.begin(), u0_int.end());
    std::vector<double> rhs(nx - 2), scratch;
    std::vector<double> out(static_cast<size_t>(nt_out) * nx_out);
    restrict_row(u, stride, out.data(), nx_out);

    for (int frame = 1; frame < nt_out; ++frame) {
        for (int s = 0; s < substeps; ++s) {
            for (int j = 1; j < nx - 1; ++j) {
                const double react = u[j] * (1.0 - u[j]) * (u[j] - alpha);
                rhs[j - 1] = u[j] + dt * react;
            }
            thomas_const(diag, off, rhs, scratch);
            for (int j = 1; j < nx - 1; ++j) u[j] = rhs[j - 1];
            u[0] = u[nx - 1] = 0.0;
        }
        restrict_row(u, stride, out.data() + static_cast<size_t>(frame) * nx_out, nx_out);
    }
    return out;
}

std::vector<double> solve_allen_cahn(std::span<const double> u0_torus, int m, double eps,
                                     int n_frames, double dt_frame,
                                     int substeps_per_frame) {
    if (static_cast<int>(u0_torus.size()) != m * m)
        throw std::invalid_argument("solve_allen_cahn: u0 must be the m x m torus field");
    const double dt = dt_frame / substeps_per_frame;
    if (dt >= 1.0)
        throw std::invalid_argument("solve_allen_cahn: substeps too coarse for the implicit split");

    fftu::Fft2 fft(m);
    const size_t mm = static_cast<size_t>(m) * m;
    std::vector<std::complex<double>> uhat(u0_torus.begin(), u0_torus.end());
    fft.forward(uhat);

    // implicit factor per mode: 1 / (1 + dt (eps k^2 - 1))
    std::vector<double> implicit(mm);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            const double k2 =
                4.0 * pi * pi *
                (static_cast<double>(fftu::freq(a, m)) * fftu::freq(a, m) +
                 static_cast<double>(fftu::freq(b, m)) * fftu::freq(b, m));
            implicit[static_cast<size_t>(a) * m + b] = 1.0 / (1.0 + dt * (eps * k2 - 1.0));
        }

    const int n = m + 1;
    std::vector<double> out(static_cast<size_t>(n_frames) * n * n);
    std::vector<std::complex<double>> work(mm), cube(mm);

    auto emit = [&](int frame) {
        work = uhat;
        fft.inverse(work);
        double* dst = out.data() + static_cast<size_t>(frame) * n * n;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                dst[static_cast<size_t>(i) * n + j] = work[static_cast<size_t>(i) * m + j].real() / mm;
        for (int i = 0; i < n; ++i) dst[static_cast<size_t>(i) * n + m] = dst[static_cast<size_t>(i) * n];
        for (int j = 0; j < n; ++j) dst[static_cast<size_t>(m) * n + j] = dst[j];
    };

    emit(0);
    for (int frame = 1; frame < n_frames; ++frame) {
        for (int s = 0; s < substeps_per_frame; ++s) {
            work = uhat;
            fft.inverse(work);
            for (size_t i = 0; i < mm; ++i) {
                const double v = work[i].real() / mm;
                cube[i] = v * v * v;
            }
            fft.forward(cube);
            for (size_t i = 0; i < mm; ++i) uhat[i] = (uhat[i] - dt * cube[i]) * implicit[i];
        }
        emit(frame);
    }
    return out;
}

}  // namespace piwno::data
