#include <cstdint>
#include <cstdio>
#include <exception>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "permuquant/calibrate.hpp"
#include "permuquant/manifest.hpp"
#include "permuquant/report.hpp"
#include "permuquant/synthetic.hpp"
#include "permuquant/tensor_io.hpp"
#include "permuquant/validate.hpp"

namespace pq = permuquant;

namespace {

// Sub-percent taus are meaningful, so parse as double and fail on garbage.
std::vector<double> parse_alpha_grid(const std::string& csv) {
    std::vector<double> grid;
    std::size_t start = 0;
    while (start <= csv.size()) {
        std::size_t end = csv.find(',', start);
        if (end == std::string::npos) end = csv.size();
        std::string item = csv.substr(start, end - start);
        const auto first = item.find_first_not_of(" \t");
        const auto last = item.find_last_not_of(" \t");
        if (first == std::string::npos) {
            throw std::invalid_argument("--alpha-grid: empty entry in '" + csv + "'");
        }
        item = item.substr(first, last - first + 1);
        std::size_t consumed = 0;
        double value = 0.0;
        try {
            value = std::stod(item, &consumed);
        } catch (const std::exception&) {
            throw std::invalid_argument("--alpha-grid: bad number '" + item + "'");
        }
        if (consumed != item.size()) {
            throw std::invalid_argument("--alpha-grid: bad number '" + item + "'");
        }
        if (!(value >= 0.0 && value <= 1.0)) {
            throw std::invalid_argument("--alpha-grid: alpha must be in [0, 1], got '" +
                                        item + "'");
        }
        grid.push_back(value);
        if (end == csv.size()) break;
        start = end + 1;
    }
    if (grid.empty()) throw std::invalid_argument("--alpha-grid: empty grid");
    return grid;
}

struct CalibrateArgs {
    std::string manifest_path;
    std::string out_path;
    int bits = 3;
    std::size_t group_size = 32;
    double tau_percent = 0.0;
    std::string alpha_grid = "0,0.2,0.4,0.6,0.8,1";
    std::string hadamard = "off";
    std::uint64_t seed = 0;
    unsigned jobs = 1;
};

int run_calibrate(const CalibrateArgs& args) {
    const pq::Manifest manifest = pq::load_manifest(args.manifest_path);
    pq::CalibrateOptions opt;
    opt.quant.bits = args.bits;
    opt.quant.group_size = args.group_size;
    opt.tau = args.tau_percent / 100.0;
    opt.alpha_grid = parse_alpha_grid(args.alpha_grid);
    opt.hadamard = args.hadamard == "on";
    opt.seed = args.seed;
    opt.jobs = args.jobs;

    const pq::CalibrationReport report = pq::calibrate(manifest, opt);
    pq::save_report(args.out_path, report);

    for (const pq::LayerReport& layer : report.layers) {
        if (!layer.ok) {
            std::printf("%-16s FAILED   %s\n", layer.name.c_str(), layer.error.c_str());
            continue;
        }
        const double deployed = layer.accepted ? layer.e_reorder : layer.e_orig;
        std::printf("%-16s %-8s alpha=%.2f e_orig=%.6e e_deployed=%.6e improvement=%.3f%%\n",
                    layer.name.c_str(), layer.accepted ? "accepted" : "rejected",
                    layer.alpha, layer.e_orig, deployed,
                    100.0 * layer.rel_improvement);
    }
    std::printf("layers: %zu ok, %zu failed, %zu accepted (rate %.3f)\n",
                report.ok_layers, report.failed_layers, report.accepted_layers,
                report.acceptance_rate);
    std::printf("total error: baseline %.6e deployed %.6e\n", report.e_orig_total,
                report.e_deployed_total);
    std::printf("report written to %s\n", args.out_path.c_str());
    return 0;
}

int run_evaluate(const std::string& manifest_path, const std::string& report_path) {
    const pq::Manifest manifest = pq::load_manifest(manifest_path);
    const pq::CalibrationReport report = pq::load_report(report_path);
    const pq::EvalResult result = pq::evaluate(manifest, report);
    for (const pq::EvalRow& row : result.rows) {
        if (!row.ok) {
            std::printf("%-16s skipped  %s\n", row.name.c_str(), row.note.c_str());
            continue;
        }
        std::printf("%-16s %-8s stored=%.9e recomputed=%.9e %s\n", row.name.c_str(),
                    row.accepted ? "accepted" : "rejected", row.e_stored,
                    row.e_recomputed, row.match ? "match" : "MISMATCH");
    }
    std::printf("evaluate: %s\n", result.all_match ? "all layers match" : "mismatch found");
    return result.all_match ? 0 : 1;
}

int run_validate(const std::string& suite_name, std::uint64_t seed) {
    const pq::Suite suite = pq::suite_from_name(suite_name);
    const pq::SuiteResult res = pq::run_validation_suite(suite, seed);
    std::printf("suite %s (seed %llu): %s (%zu checks, %zu failures, worst slack %.3e)\n",
                res.name.c_str(), static_cast<unsigned long long>(seed),
                res.passed ? "PASS" : "FAIL", res.trials, res.failures, res.worst_slack);
    for (const std::string& note : res.notes) std::printf("  %s\n", note.c_str());
    return res.passed ? 0 : 1;
}

int run_gen_synthetic(const pq::SyntheticConfig& cfg, const std::string& out_dir) {
    pq::write_synthetic_dataset(out_dir, cfg);
    std::printf("wrote %zu layers to %s (manifest.json + tensors/)\n", cfg.layers,
                out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"grouped low-bit quantization with second-moment channel reordering"};
    app.require_subcommand(1);

    CalibrateArgs cal;
    CLI::App* cmd_cal = app.add_subcommand(
        "calibrate", "select and fold per-layer channel permutations");
    cmd_cal->add_option("--manifest", cal.manifest_path, "layer manifest (json)")
        ->required();
    cmd_cal->add_option("--bits", cal.bits, "quantizer bit width")
        ->check(CLI::Range(2, 8))
        ->capture_default_str();
    cmd_cal->add_option("--group-size", cal.group_size, "channels per scale group")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd_cal->add_option("--tau", cal.tau_percent,
                        "acceptance threshold in percent improvement")
        ->capture_default_str();
    cmd_cal->add_option("--alpha-grid", cal.alpha_grid,
                        "comma-separated activation/weight blend exponents in [0,1]")
        ->capture_default_str();
    cmd_cal->add_option("--hadamard", cal.hadamard, "rotate to the Hadamard basis first")
        ->check(CLI::IsMember({"on", "off"}))
        ->capture_default_str();
    cmd_cal->add_option("--seed", cal.seed, "run seed echoed into the report")
        ->capture_default_str();
    cmd_cal->add_option("--jobs", cal.jobs, "worker threads for per-layer processing")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd_cal->add_option("--out", cal.out_path, "report output path")->required();

    std::string eval_manifest;
    std::string eval_report;
    CLI::App* cmd_eval =
        app.add_subcommand("evaluate", "re-measure deployed errors from a saved report");
    cmd_eval->add_option("--manifest", eval_manifest, "layer manifest (json)")->required();
    cmd_eval->add_option("--report", eval_report, "calibration report to check")->required();

    std::string val_suite;
    std::uint64_t val_seed = 42;
    CLI::App* cmd_val =
        app.add_subcommand("validate", "run a seeded invariant suite");
    cmd_val->add_option("--suite", val_suite, "one of bounds|sorting|folding|hadamard|sandwich")
        ->required()
        ->check(CLI::IsMember({"bounds", "sorting", "folding", "hadamard", "sandwich"}));
    cmd_val->add_option("--seed", val_seed, "suite seed")->capture_default_str();

    pq::SyntheticConfig syn;
    std::string syn_out;
    CLI::App* cmd_syn =
        app.add_subcommand("gen-synthetic", "write a synthetic calibration dataset");
    cmd_syn->add_option("--layers", syn.layers, "number of layers")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd_syn->add_option("--d", syn.d, "input channels per layer")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd_syn->add_option("--dout", syn.d_out, "output channels per layer")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd_syn->add_option("--tokens", syn.tokens, "calibration rows per layer")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd_syn->add_option("--spread", syn.spread, "channel-scale spread (0 = white)")
        ->capture_default_str();
    cmd_syn->add_option("--seed", syn.seed, "generator seed")->capture_default_str();
    cmd_syn->add_option("--out", syn_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(cmd_cal)) return run_calibrate(cal);
        if (app.got_subcommand(cmd_eval)) return run_evaluate(eval_manifest, eval_report);
        if (app.got_subcommand(cmd_val)) return run_validate(val_suite, val_seed);
        if (app.got_subcommand(cmd_syn)) return run_gen_synthetic(syn, syn_out);
    } catch (const pq::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
