#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace piwno::wavelet {

/// Orthogonal Daubechies filter bank (db1..db6), periodized.
///
/// Analysis convention: a[k] = sum_m lo_d[m] * x[(2k+m) mod n].
/// The bank is orthonormal, so synthesis is the transpose of analysis and
/// lo_r/hi_r equal the decomposition filters.
struct WaveletBasis {
    std::string name;
    std::vector<double> lo_d;  // lowpass decomposition
    std::vector<double> hi_d;  // highpass decomposition, hi[m] = (-1)^m lo[L-1-m]
    std::vector<double> lo_r;  // reconstruction (== lo_d for orthogonal banks)
    std::vector<double> hi_r;

    int length() const { return static_cast<int>(lo_d.size()); }
    int vanishing_moments() const { return length() / 2; }
};

/// Throws std::invalid_argument for names outside db1..db6.
WaveletBasis make_basis(std::string_view name);

/// Signal-extension rule applied when a level has odd length.
/// Forward transforms replicate the last sample; the adjoint of the inverse
/// zero-pads instead.
enum class PadMode { replicate, zero };

/// How the synthesis recursion removes the padded sample: crop drops it
/// (true inverse), fold adds it back into the last retained sample
/// (adjoint of the forward pad).
enum class UnpadMode { crop, fold };

struct Subband {
    int rows = 0, cols = 0;
    std::vector<double> v;  // row-major

    double& at(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
    double at(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }
};

/// Pre-padding input size of one decomposition level; enough to undo the
/// padding exactly on the way back up.
struct LevelPlan {
    int rows_in = 0, cols_in = 0;
};

/// Multilevel 2-D coefficient set. details[0] is the finest level; each
/// level holds {lh, hl, hh} where the first letter is the axis-0 (row) band.
struct CoeffPyramid {
    int levels = 0;
    int orig_rows = 0, orig_cols = 0;
    Subband approx;  // coarsest ll
    std::vector<std::array<Subband, 3>> details;
    std::vector<LevelPlan> plan;  // plan[k] = input size of level k+1

    size_t coeff_count() const;
    double energy() const;  // sum of squared coefficients
};

/// 1-D counterpart (used by tests and 1-D fields).
struct Coeff1d {
    int levels = 0;
    int orig_n = 0;
    std::vector<double> approx;
    std::vector<std::vector<double>> details;  // details[0] = finest
    std::vector<int> plan;                     // input length per level
};

// -- 2-D multilevel transform --------------------------------------------

CoeffPyramid dwt2_forward(std::span<const double> field, int rows, int cols,
                          const WaveletBasis& basis, int levels,
                          PadMode pad = PadMode::replicate);
std::vector<double> dwt2_inverse(const CoeffPyramid& pyr, const WaveletBasis& basis,
                                 UnpadMode unpad = UnpadMode::crop);

/// Transpose of dwt2_forward as a linear map R^(rows*cols) -> coefficients.
std::vector<double> dwt2_adjoint_forward(const CoeffPyramid& pyr, const WaveletBasis& basis);
/// Transpose of dwt2_inverse.
CoeffPyramid dwt2_adjoint_inverse(std::span<const double> field, int rows, int cols,
                                  const WaveletBasis& basis, int levels);

// -- 1-D multilevel transform --------------------------------------------

Coeff1d dwt1_forward(std::span<const double> x, const WaveletBasis& basis, int levels,
                     PadMode pad = PadMode::replicate);
std::vector<double> dwt1_inverse(const Coeff1d& c, const WaveletBasis& basis,
                                 UnpadMode unpad = UnpadMode::crop);
std::vector<double> dwt1_adjoint_forward(const Coeff1d& c, const WaveletBasis& basis);
Coeff1d dwt1_adjoint_inverse(std::span<const double> x, int n, const WaveletBasis& basis,
                             int levels);

}  // namespace piwno::wavelet
