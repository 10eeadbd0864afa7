#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "permuquant/reorder.hpp"

namespace permuquant {

// One calibrated layer. A row with ok == false records why the layer was
// skipped (for example the group size not dividing d_in) and carries no
// decision fields. perm is the deployed permutation: the winning candidate
// when accepted, the identity otherwise.
struct LayerReport {
    std::string name;
    bool ok = true;
    std::string error;
    Predecessor predecessor = Predecessor::linear;

    bool accepted = false;
    double alpha = 0.0;
    double e_orig = 0.0;
    double e_reorder = 0.0;
    double rel_improvement = 0.0;
    std::vector<std::size_t> perm;

    // Extremal-ratio diagnostics of the deployed (possibly rotated and
    // permuted) activation basis.
    double c_hat = 0.0;
    std::size_t degenerate_groups = 0;
    std::vector<double> rho;
};

struct CalibrationReport {
    int bits = 3;
    std::size_t group_size = 32;
    double tau = 0.0;  // acceptance threshold as a fraction
    std::vector<double> alpha_grid;
    bool hadamard = false;
    std::uint64_t seed = 0;

    std::vector<LayerReport> layers;

    // Totals over the rows above; acceptance_rate = accepted / total rows.
    std::size_t total_layers = 0;
    std::size_t ok_layers = 0;
    std::size_t failed_layers = 0;
    std::size_t accepted_layers = 0;
    double acceptance_rate = 0.0;
    double e_orig_total = 0.0;      // over ok rows
    double e_deployed_total = 0.0;  // e_reorder when accepted, else e_orig

    void recompute_totals();
};

// Deterministic JSON: fixed key order, shortest round-trip number
// representation, no timestamps. Identical reports serialize to identical
// bytes, and parsing is lossless.
std::string serialize_report(const CalibrationReport& report);
CalibrationReport parse_report(const std::string& text);  // throws IoError

void save_report(const std::filesystem::path& path, const CalibrationReport& report);
CalibrationReport load_report(const std::filesystem::path& path);

}  // namespace permuquant
