#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "permuquant/manifest.hpp"
#include "permuquant/quant.hpp"
#include "permuquant/report.hpp"

namespace permuquant {

struct CalibrateOptions {
    QuantConfig quant;
    double tau = 0.0;  // fraction; the CLI converts from percent
    std::vector<double> alpha_grid{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    bool hadamard = false;
    std::uint64_t seed = 0;  // echoed into the report
    unsigned jobs = 1;       // layer-level parallelism
};

// Runs the permutation search on every manifest layer and assembles the
// report in manifest order regardless of jobs. Per-layer contract
// violations (group size not dividing d_in, shape mismatches) become
// failed rows; unreadable or corrupt tensor files throw IoError.
CalibrationReport calibrate(const Manifest& manifest, const CalibrateOptions& opt);

// Recomputation of each stored layer error from the manifest tensors and
// the report's deployed permutation. match is relative agreement within
// 1e-9; failed rows are carried through without recomputation.
struct EvalRow {
    std::string name;
    bool ok = true;
    bool accepted = false;
    double e_stored = 0.0;
    double e_recomputed = 0.0;
    bool match = false;
    std::string note;
};

struct EvalResult {
    std::vector<EvalRow> rows;
    bool all_match = false;
};

EvalResult evaluate(const Manifest& manifest, const CalibrationReport& report);

}  // namespace permuquant
