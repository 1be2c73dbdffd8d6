#pragma once

#include <complex>
#include <vector>

namespace piwno::fftu {

/// Square 2-D complex FFT (row-major, unnormalized) backed by FFTW with
/// deterministic ESTIMATE planning. Not thread-safe; create one per thread.
class Fft2 {
public:
    explicit Fft2(int n);
    ~Fft2();
    Fft2(const Fft2&) = delete;
    Fft2& operator=(const Fft2&) = delete;

    void forward(std::vector<std::complex<double>>& data) const;
    /// Unnormalized inverse; divide by n*n to invert forward().
    void inverse(std::vector<std::complex<double>>& data) const;
    int size() const { return n_; }

private:
    void run(std::vector<std::complex<double>>& data, bool fwd) const;
    int n_;
    void* buf_ = nullptr;
    void* plan_fwd_ = nullptr;
    void* plan_bwd_ = nullptr;
};

/// Signed frequency for index a on an m-point periodic grid.
inline int freq(int a, int m) { return (a <= m / 2) ? a : a - m; }

}  // namespace piwno::fftu
