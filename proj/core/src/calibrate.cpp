#include "permuquant/calibrate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "permuquant/hadamard.hpp"
#include "permuquant/stats.hpp"
#include "permuquant/tensor_io.hpp"

namespace permuquant {

namespace {

// Recomputation must agree with calibration to this relative tolerance.
constexpr double kEvalRelTol = 1e-9;

struct LoadedLayer {
    Matrix weight;
    Matrix acts;
};

// Tensors as quantization sees them: rotated into the Hadamard basis when
// requested, untouched otherwise.
LoadedLayer load_quant_basis(const ManifestEntry& entry, bool hadamard) {
    LoadedLayer l;
    l.weight = load_tensor(entry.weight_path);
    l.acts = load_tensor(entry.acts_path);
    if (hadamard && l.acts.cols() == l.weight.rows() && l.acts.cols() > 0) {
        const std::size_t block = largest_pow2_block(l.acts.cols());
        l.acts = fwht_rows(l.acts, block);
        l.weight = fwht_cols(l.weight, block);
    }
    return l;
}

LayerReport process_layer(const ManifestEntry& entry, const CalibrateOptions& opt) {
    LayerReport row;
    row.name = entry.name;
    row.predecessor = entry.predecessor;

    // Tensor-level failures (missing, corrupt) abort the whole run via
    // IoError; only layer contract violations become failed rows.
    LoadedLayer l = load_quant_basis(entry, opt.hadamard);
    try {
        LayerSpec spec{std::move(l.weight), std::move(l.acts), entry.predecessor};
        const ReorderDecision dec =
            select_permutation(spec, opt.quant, opt.alpha_grid, opt.tau);

        row.accepted = dec.accepted;
        row.alpha = dec.alpha;
        row.e_orig = dec.e_orig;
        row.e_reorder = dec.e_reorder;
        row.rel_improvement = dec.rel_improvement;
        row.perm = dec.perm.forward();

        const Matrix deployed_acts = apply_perm_cols(spec.calib_acts, dec.perm);
        const ExtremalDiagnostics diag =
            group_rho(deployed_acts, Grouping(deployed_acts.cols(), opt.quant.group_size));
        row.c_hat = diag.c_hat;
        row.rho = diag.rho;
        row.degenerate_groups = 0;
        for (std::uint8_t f : diag.degenerate) row.degenerate_groups += f;
    } catch (const std::invalid_argument& ex) {
        row = LayerReport{};
        row.name = entry.name;
        row.predecessor = entry.predecessor;
        row.ok = false;
        row.error = ex.what();
    }
    return row;
}

}  // namespace

CalibrationReport calibrate(const Manifest& manifest, const CalibrateOptions& opt) {
    opt.quant.validate();
    if (opt.alpha_grid.empty()) {
        throw std::invalid_argument("calibrate: empty alpha grid");
    }
    for (double a : opt.alpha_grid) {
        if (!(a >= 0.0 && a <= 1.0)) {
            throw std::invalid_argument("calibrate: alpha must be in [0, 1]");
        }
    }
    if (!std::isfinite(opt.tau)) {
        throw std::invalid_argument("calibrate: tau must be finite");
    }
    if (opt.jobs == 0) {
        throw std::invalid_argument("calibrate: jobs must be positive");
    }

    const std::size_t n = manifest.layers.size();
    std::vector<LayerReport> rows(n);

    // Workers pull layer indices from a shared counter and write into
    // per-layer slots, so the report order is the manifest order no matter
    // how many jobs run.
    std::atomic<std::size_t> next{0};
    std::exception_ptr fatal;
    std::mutex fatal_mutex;

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                rows[i] = process_layer(manifest.layers[i], opt);
            } catch (...) {
                std::lock_guard<std::mutex> lock(fatal_mutex);
                if (!fatal) fatal = std::current_exception();
                return;
            }
        }
    };

    const std::size_t threads = std::min<std::size_t>(opt.jobs, std::max<std::size_t>(n, 1));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    if (fatal) std::rethrow_exception(fatal);

    CalibrationReport report;
    report.bits = opt.quant.bits;
    report.group_size = opt.quant.group_size;
    report.tau = opt.tau;
    report.alpha_grid = opt.alpha_grid;
    report.hadamard = opt.hadamard;
    report.seed = opt.seed;
    report.layers = std::move(rows);
    report.recompute_totals();
    return report;
}

EvalResult evaluate(const Manifest& manifest, const CalibrationReport& report) {
    std::map<std::string, const ManifestEntry*> by_name;
    for (const ManifestEntry& e : manifest.layers) by_name[e.name] = &e;

    CalibrateOptions opt;
    opt.quant.bits = report.bits;
    opt.quant.group_size = report.group_size;
    opt.hadamard = report.hadamard;

    EvalResult result;
    result.all_match = true;
    for (const LayerReport& row : report.layers) {
        EvalRow er;
        er.name = row.name;
        er.accepted = row.accepted;
        if (!row.ok) {
            er.ok = false;
            er.match = true;  // nothing stored to contradict
            er.note = "skipped during calibration: " + row.error;
            result.rows.push_back(std::move(er));
            continue;
        }
        const auto it = by_name.find(row.name);
        if (it == by_name.end()) {
            throw IoError("evaluate: layer '" + row.name + "' not present in manifest");
        }

        LoadedLayer l = load_quant_basis(*it->second, report.hadamard);
        LayerSpec spec{std::move(l.weight), std::move(l.acts), row.predecessor};
        if (row.perm.size() != spec.calib_acts.cols()) {
            throw IoError("evaluate: layer '" + row.name + "' stores a permutation of length " +
                          std::to_string(row.perm.size()) + " but the layer has " +
                          std::to_string(spec.calib_acts.cols()) + " channels (stale report)");
        }
        const Permutation perm{row.perm};

        er.e_stored = row.accepted ? row.e_reorder : row.e_orig;
        er.e_recomputed = layer_quant_error(spec, perm, opt.quant);
        const double diff = std::fabs(er.e_recomputed - er.e_stored);
        const double scale = std::max(std::fabs(er.e_recomputed), std::fabs(er.e_stored));
        er.match = er.e_recomputed == er.e_stored || diff <= kEvalRelTol * scale;
        if (!er.match) {
            er.note = "stored and recomputed errors disagree";
            result.all_match = false;
        }
        result.rows.push_back(std::move(er));
    }
    return result;
}

}  // namespace permuquant
