#pragma once

#include <json.hpp>
#include <span>
#include <string>
#include <vector>

#include "piwno/physics.hpp"

namespace piwno::data {

struct Array {
    std::string name;
    std::vector<int> shape;  // leading dimension is the sample count
    std::vector<double> data;

    long numel() const {
        long n = 1;
        for (int d : shape) n *= d;
        return n;
    }
    /// Row-major slice of sample i (all trailing dimensions).
    std::span<const double> sample(int i) const {
        const long per = numel() / shape[0];
        return {data.data() + static_cast<size_t>(i) * per, static_cast<size_t>(per)};
    }
};

/// In-memory benchmark dataset plus the manifest that regenerates it
/// bit-exactly.
struct Dataset {
    std::string problem;
    int n_samples = 0;
    uint64_t seed = 0;
    nlohmann::json manifest;
    std::vector<Array> arrays;

    const Array* find(const std::string& name) const;
    bool has_solutions() const { return find("outputs") != nullptr; }
};

/// Container file: magic "PWNO", version u16, length-prefixed UTF-8 JSON
/// header, then raw row-major little-endian arrays in header order.
void write_pwno(const Dataset& ds, const std::string& path, const std::string& dtype = "f64");
Dataset read_pwno(const std::string& path);

/// Draws n inputs with the problem's sampler; attaches ground-truth
/// solutions when requested (the conditioning frames of allen-cahn always
/// require the solver).
Dataset build_dataset(phys::ProblemId id, int n, uint64_t seed, bool with_solutions);

/// Per-problem input encoding: raw sample arrays -> network channel stack
/// {in_channels, n0*n1} for the given problem grid.
std::vector<double> encode_input(const phys::ProblemSpec& spec, const Dataset& ds, int i);

/// Table-1 sample counts used as generation defaults.
int default_sample_count(phys::ProblemId id);

}  // namespace piwno::data
