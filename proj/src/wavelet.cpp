#include "piwno/wavelet.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace piwno::wavelet {

namespace {

// Daubechies lowpass filters with h0 first (extremal-phase orientation so
// the analysis step is a plain correlation). Values to full double precision.
const std::vector<double>& db_lowpass(int k) {
    static const std::vector<double> tabs[6] = {
        // db1 (Haar)
        {0.70710678118654757, 0.70710678118654757},
        // db2
        {0.48296291314453416, 0.83651630373780794, 0.22414386804201339,
         -0.12940952255126037},
        // db3
        {0.33267055295008263, 0.80689150931109255, 0.45987750211849154,
         -0.13501102001025458, -0.085441273882026658, 0.035226291885709533},
        // db4
        {0.23037781330889651, 0.71484657055291567, 0.63088076792985892,
         -0.027983769416859854, -0.18703481171909309, 0.030841381835560764,
         0.032883011666885197, -0.010597401785069032},
        // db5
        {0.16010239797419293, 0.60382926979718965, 0.72430852843777294,
         0.13842814590132074, -0.24229488706638203, -0.032244869584638375,
         0.077571493840045719, -0.0062414902127982744, -0.012580751999081999,
         0.0033357252854737712},
        // db6
        {0.11154074335010947, 0.49462389039845306, 0.75113390802109536,
         0.31525035170919763, -0.22626469396543983, -0.12976686756726194,
         0.097501605587323043, 0.027522865530305727, -0.03158203931748603,
         0.00055384220116149613, 0.0047772575109455108, -0.0010773010853084796},
    };
    return tabs[k - 1];
}

int padded(int n) { return (n % 2 == 0) ? n : n + 1; }

// Single-level periodized analysis on an even-length signal.
// x has length n (stride between samples given), outputs halves of length n/2.
void analyze(const double* x, int n, int stride, const WaveletBasis& b, double* lo,
             double* hi) {
    const int half = n / 2;
    const int L = b.length();
    for (int k = 0; k < half; ++k) {
        double sa = 0.0, sd = 0.0;
        int idx = (2 * k) % n;
        for (int m = 0; m < L; ++m) {
            const double xv = x[static_cast<size_t>(idx) * stride];
            sa += b.lo_d[m] * xv;
            sd += b.hi_d[m] * xv;
            if (++idx == n) idx = 0;
        }
        lo[k] = sa;
        hi[k] = sd;
    }
}

// Transpose of analyze: scatter coefficient contributions back onto x.
void synthesize(const double* lo, const double* hi, int n, const WaveletBasis& b,
                double* x, int stride) {
    const int half = n / 2;
    const int L = b.length();
    for (int i = 0; i < n; ++i) x[static_cast<size_t>(i) * stride] = 0.0;
    for (int k = 0; k < half; ++k) {
        int idx = (2 * k) % n;
        const double a = lo[k], d = hi[k];
        for (int m = 0; m < L; ++m) {
            x[static_cast<size_t>(idx) * stride] += a * b.lo_r[m] + d * b.hi_r[m];
            if (++idx == n) idx = 0;
        }
    }
}

void check_levels(int rows, int cols, int levels) {
    if (levels < 1) throw std::invalid_argument("dwt: levels must be >= 1");
    if (padded(rows) < (1 << levels) || (cols > 1 && padded(cols) < (1 << levels)))
        throw std::invalid_argument("dwt: decomposition too deep for field size");
}

// One 2-D level. Input (r x c) possibly odd; pads to even, then separable
// analysis along axis 1 (within rows) followed by axis 0.
void level2_forward(const std::vector<double>& in, int r, int c, const WaveletBasis& b,
                    PadMode pad, Subband& ll, Subband& lh, Subband& hl, Subband& hh) {
    const int re = padded(r), ce = padded(c);
    std::vector<double> buf(static_cast<size_t>(re) * ce, 0.0);
    for (int i = 0; i < r; ++i)
        std::memcpy(&buf[static_cast<size_t>(i) * ce], &in[static_cast<size_t>(i) * c],
                    sizeof(double) * c);
    if (ce != c && pad == PadMode::replicate)
        for (int i = 0; i < r; ++i) buf[static_cast<size_t>(i) * ce + c] = buf[static_cast<size_t>(i) * ce + c - 1];
    if (re != r) {
        if (pad == PadMode::replicate)
            std::memcpy(&buf[static_cast<size_t>(r) * ce], &buf[static_cast<size_t>(r - 1) * ce],
                        sizeof(double) * ce);
        // zero mode: row already zero
    }

    const int hc = ce / 2, hr = re / 2;
    std::vector<double> lo_rows(static_cast<size_t>(re) * hc), hi_rows(static_cast<size_t>(re) * hc);
    for (int i = 0; i < re; ++i)
        analyze(&buf[static_cast<size_t>(i) * ce], ce, 1, b, &lo_rows[static_cast<size_t>(i) * hc],
                &hi_rows[static_cast<size_t>(i) * hc]);

    ll = {hr, hc, std::vector<double>(static_cast<size_t>(hr) * hc)};
    lh = {hr, hc, std::vector<double>(static_cast<size_t>(hr) * hc)};
    hl = {hr, hc, std::vector<double>(static_cast<size_t>(hr) * hc)};
    hh = {hr, hc, std::vector<double>(static_cast<size_t>(hr) * hc)};
    std::vector<double> clo(hr), chi(hr);
    for (int j = 0; j < hc; ++j) {
        analyze(&lo_rows[j], re, hc, b, clo.data(), chi.data());
        for (int i = 0; i < hr; ++i) { ll.at(i, j) = clo[i]; hl.at(i, j) = chi[i]; }
        analyze(&hi_rows[j], re, hc, b, clo.data(), chi.data());
        for (int i = 0; i < hr; ++i) { lh.at(i, j) = clo[i]; hh.at(i, j) = chi[i]; }
    }
}

// Transpose/inverse of level2_forward back onto an (r x c) field.
void level2_backward(const Subband& ll, const Subband& lh, const Subband& hl,
                     const Subband& hh, int r, int c, const WaveletBasis& b,
                     UnpadMode unpad, std::vector<double>& out) {
    const int re = padded(r), ce = padded(c);
    const int hr = re / 2, hc = ce / 2;
    std::vector<double> lo_rows(static_cast<size_t>(re) * hc), hi_rows(static_cast<size_t>(re) * hc);
    std::vector<double> clo(hr), chi(hr), col(re);
    for (int j = 0; j < hc; ++j) {
        for (int i = 0; i < hr; ++i) { clo[i] = ll.at(i, j); chi[i] = hl.at(i, j); }
        synthesize(clo.data(), chi.data(), re, b, col.data(), 1);
        for (int i = 0; i < re; ++i) lo_rows[static_cast<size_t>(i) * hc + j] = col[i];
        for (int i = 0; i < hr; ++i) { clo[i] = lh.at(i, j); chi[i] = hh.at(i, j); }
        synthesize(clo.data(), chi.data(), re, b, col.data(), 1);
        for (int i = 0; i < re; ++i) hi_rows[static_cast<size_t>(i) * hc + j] = col[i];
    }
    std::vector<double> buf(static_cast<size_t>(re) * ce);
    std::vector<double> rlo(hc), rhi(hc), rowv(ce);
    for (int i = 0; i < re; ++i) {
        for (int j = 0; j < hc; ++j) { rlo[j] = lo_rows[static_cast<size_t>(i) * hc + j]; rhi[j] = hi_rows[static_cast<size_t>(i) * hc + j]; }
        synthesize(rlo.data(), rhi.data(), ce, b, rowv.data(), 1);
        std::memcpy(&buf[static_cast<size_t>(i) * ce], rowv.data(), sizeof(double) * ce);
    }
    if (re != r && unpad == UnpadMode::fold)
        for (int j = 0; j < ce; ++j) buf[static_cast<size_t>(r - 1) * ce + j] += buf[static_cast<size_t>(r) * ce + j];
    out.assign(static_cast<size_t>(r) * c, 0.0);
    for (int i = 0; i < r; ++i) {
        std::memcpy(&out[static_cast<size_t>(i) * c], &buf[static_cast<size_t>(i) * ce], sizeof(double) * c);
        if (ce != c && unpad == UnpadMode::fold)
            out[static_cast<size_t>(i) * c + c - 1] += buf[static_cast<size_t>(i) * ce + c];
    }
}

}  // namespace

WaveletBasis make_basis(std::string_view name) {
    if (name.size() != 3 || name.substr(0, 2) != "db" || name[2] < '1' || name[2] > '6')
        throw std::invalid_argument("make_basis: unknown basis '" + std::string(name) +
                                    "' (supported: db1..db6)");
    const int k = name[2] - '0';
    WaveletBasis b;
    b.name = std::string(name);
    b.lo_d = db_lowpass(k);
    const int L = b.length();
    b.hi_d.resize(L);
    for (int m = 0; m < L; ++m)
        b.hi_d[m] = ((m % 2 == 0) ? 1.0 : -1.0) * b.lo_d[static_cast<size_t>(L - 1 - m)];
    b.lo_r = b.lo_d;  // orthonormal bank: synthesis is the transpose
    b.hi_r = b.hi_d;
    return b;
}

size_t CoeffPyramid::coeff_count() const {
    size_t n = approx.v.size();
    for (const auto& lvl : details)
        for (const auto& s : lvl) n += s.v.size();
    return n;
}

double CoeffPyramid::energy() const {
    double e = 0.0;
    for (double x : approx.v) e += x * x;
    for (const auto& lvl : details)
        for (const auto& s : lvl)
            for (double x : s.v) e += x * x;
    return e;
}

CoeffPyramid dwt2_forward(std::span<const double> field, int rows, int cols,
                          const WaveletBasis& basis, int levels, PadMode pad) {
    if (static_cast<size_t>(rows) * cols != field.size())
        throw std::invalid_argument("dwt2_forward: field size mismatch");
    check_levels(rows, cols, levels);
    CoeffPyramid pyr;
    pyr.levels = levels;
    pyr.orig_rows = rows;
    pyr.orig_cols = cols;
    pyr.details.resize(levels);
    pyr.plan.resize(levels);
    std::vector<double> cur(field.begin(), field.end());
    int r = rows, c = cols;
    for (int l = 0; l < levels; ++l) {
        pyr.plan[l] = {r, c};
        Subband ll, lh, hl, hh;
        level2_forward(cur, r, c, basis, pad, ll, lh, hl, hh);
        pyr.details[l] = {std::move(lh), std::move(hl), std::move(hh)};
        r = ll.rows;
        c = ll.cols;
        cur = std::move(ll.v);
        if (l == levels - 1) pyr.approx = {r, c, std::move(cur)};
    }
    return pyr;
}

static std::vector<double> reconstruct(const CoeffPyramid& pyr, const WaveletBasis& basis,
                                       UnpadMode unpad) {
    std::vector<double> cur = pyr.approx.v;
    int r = pyr.approx.rows, c = pyr.approx.cols;
    for (int l = pyr.levels - 1; l >= 0; --l) {
        const auto& plan = pyr.plan[l];
        Subband ll{r, c, cur};
        std::vector<double> out;
        level2_backward(ll, pyr.details[l][0], pyr.details[l][1], pyr.details[l][2],
                        plan.rows_in, plan.cols_in, basis, unpad, out);
        cur = std::move(out);
        r = plan.rows_in;
        c = plan.cols_in;
    }
    return cur;
}

std::vector<double> dwt2_inverse(const CoeffPyramid& pyr, const WaveletBasis& basis,
                                 UnpadMode unpad) {
    if (pyr.levels < 1 || pyr.plan.size() != static_cast<size_t>(pyr.levels) ||
        pyr.details.size() != static_cast<size_t>(pyr.levels))
        throw std::invalid_argument("dwt2_inverse: inconsistent pyramid metadata");
    return reconstruct(pyr, basis, unpad);
}

std::vector<double> dwt2_adjoint_forward(const CoeffPyramid& pyr, const WaveletBasis& basis) {
    return reconstruct(pyr, basis, UnpadMode::fold);
}

CoeffPyramid dwt2_adjoint_inverse(std::span<const double> field, int rows, int cols,
                                  const WaveletBasis& basis, int levels) {
    return dwt2_forward(field, rows, cols, basis, levels, PadMode::zero);
}

Coeff1d dwt1_forward(std::span<const double> x, const WaveletBasis& basis, int levels,
                     PadMode pad) {
    check_levels(static_cast<int>(x.size()), 1, levels);
    Coeff1d c;
    c.levels = levels;
    c.orig_n = static_cast<int>(x.size());
    c.details.resize(levels);
    c.plan.resize(levels);
    std::vector<double> cur(x.begin(), x.end());
    for (int l = 0; l < levels; ++l) {
        int n = static_cast<int>(cur.size());
        c.plan[l] = n;
        if (n % 2 != 0) cur.push_back(pad == PadMode::replicate ? cur.back() : 0.0);
        const int ne = static_cast<int>(cur.size());
        std::vector<double> lo(ne / 2), hi(ne / 2);
        analyze(cur.data(), ne, 1, basis, lo.data(), hi.data());
        c.details[l] = std::move(hi);
        cur = std::move(lo);
    }
    c.approx = std::move(cur);
    return c;
}

static std::vector<double> reconstruct1(const Coeff1d& c, const WaveletBasis& basis,
                                        UnpadMode unpad) {
    std::vector<double> cur = c.approx;
    for (int l = c.levels - 1; l >= 0; --l) {
        const int n_in = c.plan[l];
        const int ne = padded(n_in);
        std::vector<double> out(ne);
        synthesize(cur.data(), c.details[l].data(), ne, basis, out.data(), 1);
        if (ne != n_in && unpad == UnpadMode::fold) out[n_in - 1] += out[n_in];
        out.resize(n_in);
        cur = std::move(out);
    }
    return cur;
}

std::vector<double> dwt1_inverse(const Coeff1d& c, const WaveletBasis& basis,
                                 UnpadMode unpad) {
    return reconstruct1(c, basis, unpad);
}

std::vector<double> dwt1_adjoint_forward(const Coeff1d& c, const WaveletBasis& basis) {
    return reconstruct1(c, basis, UnpadMode::fold);
}

Coeff1d dwt1_adjoint_inverse(std::span<const double> x, int n, const WaveletBasis& basis,
                             int levels) {
    if (static_cast<int>(x.size()) != n)
        throw std::invalid_argument("dwt1_adjoint_inverse: size mismatch");
    return dwt1_forward(x, basis, levels, PadMode::zero);
}

}  // namespace piwno::wavelet
