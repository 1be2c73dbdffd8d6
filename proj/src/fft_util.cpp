#include "piwno/fft_util.hpp"

#include <fftw3.h>

#include <cstring>
#include <stdexcept>

namespace piwno::fftu {

Fft2::Fft2(int n) : n_(n) {
    if (n < 2) throw std::invalid_argument("Fft2: size too small");
    auto* buf = fftw_alloc_complex(static_cast<size_t>(n) * n);
    buf_ = buf;
    plan_fwd_ = fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    plan_bwd_ = fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!plan_fwd_ || !plan_bwd_) throw std::runtime_error("Fft2: planning failed");
}

Fft2::~Fft2() {
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
    fftw_free(static_cast<fftw_complex*>(buf_));
}

void Fft2::run(std::vector<std::complex<double>>& data, bool fwd) const {
    const size_t count = static_cast<size_t>(n_) * n_;
    if (data.size() != count) throw std::invalid_argument("Fft2: size mismatch");
    auto* buf = static_cast<fftw_complex*>(buf_);
    std::memcpy(buf, data.data(), count * sizeof(fftw_complex));
    fftw_execute(static_cast<fftw_plan>(fwd ? plan_fwd_ : plan_bwd_));
    std::memcpy(data.data(), buf, count * sizeof(fftw_complex));
}

void Fft2::forward(std::vector<std::complex<double>>& data) const { run(data, true); }
void Fft2::inverse(std::vector<std::complex<double>>& data) const { run(data, false); }

}  // namespace piwno::fftu
