#include "piwno/dataset.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

#include "piwno/sampling.hpp"
#include "piwno/solvers.hpp"

namespace piwno::data {

using nlohmann::json;

const Array* Dataset::find(const std::string& name) const {
    for (const auto& a : arrays)
        if (a.name == name) return &a;
    return nullptr;
}

namespace {

constexpr char kMagic[4] = {'P', 'W', 'N', 'O'};
constexpr uint16_t kVersion = 1;

template <typename T>
void write_raw(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& is) {
    T v;
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("pwno: truncated file");
    return v;
}

}  // namespace

void write_pwno(const Dataset& ds, const std::string& path, const std::string& dtype) {
    if (dtype != "f64" && dtype != "f32")
        throw std::invalid_argument("write_pwno: dtype must be f32 or f64");
    json header;
    header["problem"] = ds.problem;
    header["n_samples"] = ds.n_samples;
    header["seed"] = ds.seed;
    header["dtype"] = dtype;
    header["endianness"] = "LE";
    header["arrays"] = json::array();
    for (const auto& a : ds.arrays)
        header["arrays"].push_back({{"name", a.name}, {"shape", a.shape}});
    header["manifest"] = ds.manifest;
    const std::string htext = header.dump();

    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_pwno: cannot open " + path);
    os.write(kMagic, 4);
    write_raw(os, kVersion);
    write_raw(os, static_cast<uint32_t>(htext.size()));
    os.write(htext.data(), static_cast<std::streamsize>(htext.size()));
    for (const auto& a : ds.arrays) {
        if (dtype == "f64") {
            os.write(reinterpret_cast<const char*>(a.data.data()),
                     static_cast<std::streamsize>(a.data.size() * sizeof(double)));
        } else {
            std::vector<float> f(a.data.begin(), a.data.end());
            os.write(reinterpret_cast<const char*>(f.data()),
                     static_cast<std::streamsize>(f.size() * sizeof(float)));
        }
    }
    if (!os) throw std::runtime_error("write_pwno: write failed for " + path);
}

Dataset read_pwno(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_pwno: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("read_pwno: bad magic in " + path);
    const auto version = read_raw<uint16_t>(is);
    if (version != kVersion) throw std::runtime_error("read_pwno: unsupported version");
    const auto hlen = read_raw<uint32_t>(is);
    std::string htext(hlen, '\0');
    is.read(htext.data(), hlen);
    if (!is) throw std::runtime_error("read_pwno: truncated header");
    json header = json::parse(htext);
    if (header.at("endianness").get<std::string>() != "LE")
        throw std::runtime_error("read_pwno: unsupported endianness");
    const std::string dtype = header.at("dtype").get<std::string>();

    Dataset ds;
    ds.problem = header.at("problem").get<std::string>();
    ds.n_samples = header.at("n_samples").get<int>();
    ds.seed = header.at("seed").get<uint64_t>();
    ds.manifest = header.at("manifest");
    for (const auto& meta : header.at("arrays")) {
        Array a;
        a.name = meta.at("name").get<std::string>();
        a.shape = meta.at("shape").get<std::vector<int>>();
        const long n = a.numel();
        a.data.resize(n);
        if (dtype == "f64") {
            is.read(reinterpret_cast<char*>(a.data.data()),
                    static_cast<std::streamsize>(n * sizeof(double)));
        } else {
            std::vector<float> f(n);
            is.read(reinterpret_cast<char*>(f.data()),
                    static_cast<std::streamsize>(n * sizeof(float)));
            std::copy(f.begin(), f.end(), a.data.begin());
        }
        if (!is) throw std::runtime_error("read_pwno: truncated array " + a.name);
        ds.arrays.push_back(std::move(a));
    }
    return ds;
}

int default_sample_count(phys::ProblemId id) {
    switch (id) {
        case phys::ProblemId::burgers: return 300;
        case phys::ProblemId::nagumo: return 800;
        case phys::ProblemId::poisson: return 500;
        case phys::ProblemId::allen_cahn: return 600;
    }
    return 0;
}

Dataset build_dataset(phys::ProblemId id, int n, uint64_t seed, bool with_solutions) {
    if (n < 1) throw std::invalid_argument("build_dataset: need at least one sample");
    Dataset ds;
    ds.problem = phys::to_string(id);
    ds.n_samples = n;
    ds.seed = seed;
    ds.manifest = {{"problem", ds.problem},
                   {"seed", seed},
                   {"n_samples", n},
                   {"with_solutions", with_solutions},
                   {"generator", "piwno-gen"},
                   {"version", 1}};

    switch (id) {
        case phys::ProblemId::burgers: {
            const int nx = 81, nt = 81, nx_int = 641;
            Array in{"inputs", {n, nx}, {}};
            in.data.resize(static_cast<size_t>(n) * nx);
            Array outp{"outputs", {n, nt, nx}, {}};
            if (with_solutions) outp.data.resize(static_cast<size_t>(n) * nt * nx);
            for (int i = 0; i < n; ++i) {
                const auto ic = draw_burgers_ic(derive_seed(seed, i));
                for (int j = 0; j < nx; ++j)
                    in.data[static_cast<size_t>(i) * nx + j] = ic(static_cast<double>(j) / (nx - 1));
                if (with_solutions) {
                    std::vector<double> u0(nx_int);
                    for (int j = 0; j < nx_int; ++j)
                        u0[j] = ic(static_cast<double>(j) / (nx_int - 1));
                    auto sol = solve_burgers(u0, 0.1, nx, nt, nx_int);
                    std::copy(sol.begin(), sol.end(),
                              outp.data.begin() + static_cast<size_t>(i) * nt * nx);
                }
            }
            ds.manifest["nu"] = 0.1;
            ds.manifest["nx_int"] = nx_int;
            ds.arrays.push_back(std::move(in));
            if (with_solutions) ds.arrays.push_back(std::move(outp));
            break;
        }
        case phys::ProblemId::nagumo: {
            const int nx = 65, nt = 65, nx_int = 257, stride = (nx_int - 1) / (nx - 1);
            GrfSpec g;
            GrfSe1d grf(nx_int, g);
            Array in{"inputs", {n, nx}, {}};
            in.data.resize(static_cast<size_t>(n) * nx);
            Array outp{"outputs", {n, nt, nx}, {}};
            if (with_solutions) outp.data.resize(static_cast<size_t>(n) * nt * nx);
            for (int i = 0; i < n; ++i) {
                auto u0 = grf.sample(derive_seed(seed, i));
                for (int j = 0; j < nx; ++j)
                    in.data[static_cast<size_t>(i) * nx + j] = u0[static_cast<size_t>(j) * stride];
                if (with_solutions) {
                    auto sol = solve_nagumo(u0, 1.0, -0.5, nx, nt, nx_int);
                    std::copy(sol.begin(), sol.end(),
                              outp.data.begin() + static_cast<size_t>(i) * nt * nx);
                }
            }
            ds.manifest["grf"] = {{"kind", "squared-exponential"}, {"sigma", g.sigma},
                                  {"length", g.length}};
            ds.manifest["nx_int"] = nx_int;
            ds.arrays.push_back(std::move(in));
            if (with_solutions) ds.arrays.push_back(std::move(outp));
            break;
        }
        case phys::ProblemId::poisson: {
            const int nn = 65;
            Array in{"inputs", {n, nn, nn}, {}};
            in.data.resize(static_cast<size_t>(n) * nn * nn);
            Array outp{"outputs", {n, nn, nn}, {}};
            if (with_solutions) outp.data.resize(static_cast<size_t>(n) * nn * nn);
            for (int i = 0; i < n; ++i) {
                auto pair = draw_poisson_pair(derive_seed(seed, i), nn);
                std::copy(pair.f.begin(), pair.f.end(),
                          in.data.begin() + static_cast<size_t>(i) * nn * nn);
                if (with_solutions)
                    std::copy(pair.u.begin(), pair.u.end(),
                              outp.data.begin() + static_cast<size_t>(i) * nn * nn);
            }
            ds.arrays.push_back(std::move(in));
            if (with_solutions) ds.arrays.push_back(std::move(outp));
            break;
        }
        case phys::ProblemId::allen_cahn: {
            const int nn = 65, m = 64, fin = 10, fout = 10;
            GrfSpec g;
            g.kind = GrfSpec::Kind::periodic_spectral;
            Array in{"inputs", {n, fin, nn, nn}, {}};
            in.data.resize(static_cast<size_t>(n) * fin * nn * nn);
            Array outp{"outputs", {n, fout, nn, nn}, {}};
            if (with_solutions) outp.data.resize(static_cast<size_t>(n) * fout * nn * nn);
            const int frames = with_solutions ? 21 : 11;
            for (int i = 0; i < n; ++i) {
                auto field = sample_grf_periodic2d(nn, g, derive_seed(seed, i));
                std::vector<double> torus(static_cast<size_t>(m) * m);
                for (int r = 0; r < m; ++r)
                    for (int c = 0; c < m; ++c)
                        torus[static_cast<size_t>(r) * m + c] = field[static_cast<size_t>(r) * nn + c];
                auto sol = solve_allen_cahn(torus, m, 1e-3, frames, 1.0);
                const size_t fsz = static_cast<size_t>(nn) * nn;
                for (int k = 0; k < fin; ++k)  // conditioning frames t = 1..10
                    std::copy_n(sol.begin() + (k + 1) * fsz, fsz,
                                in.data.begin() + (static_cast<size_t>(i) * fin + k) * fsz);
                if (with_solutions)
                    for (int k = 0; k < fout; ++k)  // targets t = 11..20
                        std::copy_n(sol.begin() + (k + 11) * fsz, fsz,
                                    outp.data.begin() + (static_cast<size_t>(i) * fout + k) * fsz);
            }
            ds.manifest["grf"] = {{"kind", "periodic-spectral"}, {"tau", g.tau},
                                  {"alpha", g.alpha_k}};
            ds.manifest["eps"] = 1e-3;
            ds.arrays.push_back(std::move(in));
            if (with_solutions) ds.arrays.push_back(std::move(outp));
            break;
        }
    }
    return ds;
}

std::vector<double> encode_input(const phys::ProblemSpec& spec, const Dataset& ds, int i) {
    const Array* in = ds.find("inputs");
    if (!in) throw std::runtime_error("encode_input: dataset has no inputs array");
    const int N = spec.points();
    std::vector<double> a(static_cast<size_t>(spec.in_channels) * N);
    auto coord0 = [&](int p) { return spec.lo0 + (p / spec.n1) * spec.h0(); };
    auto coord1 = [&](int p) { return spec.lo1 + (p % spec.n1) * spec.h1(); };
    const auto s = in->sample(i);

    switch (spec.id) {
        case phys::ProblemId::burgers:
        case phys::ProblemId::nagumo: {
            // channels: u0 broadcast along t, x, t
            for (int p = 0; p < N; ++p) {
                a[p] = s[p % spec.n1];
                a[N + p] = coord1(p);
                a[2 * static_cast<size_t>(N) + p] = coord0(p);
            }
            break;
        }
        case phys::ProblemId::poisson: {
            // channels: f, x, y
            for (int p = 0; p < N; ++p) {
                a[p] = s[p];
                a[N + p] = coord1(p);
                a[2 * static_cast<size_t>(N) + p] = coord0(p);
            }
            break;
        }
        case phys::ProblemId::allen_cahn: {
            // channels: ten conditioning frames, then x, y
            for (int k = 0; k < spec.frames_in; ++k)
                std::copy_n(s.begin() + static_cast<size_t>(k) * N, N,
                            a.begin() + static_cast<size_t>(k) * N);
            for (int p = 0; p < N; ++p) {
                a[static_cast<size_t>(spec.frames_in) * N + p] = coord1(p);
                a[(static_cast<size_t>(spec.frames_in) + 1) * N + p] = coord0(p);
            }
            break;
        }
    }
    return a;
}

}  // namespace piwno::data
