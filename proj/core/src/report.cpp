#include "permuquant/report.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "permuquant/permutation.hpp"
#include "permuquant/tensor_io.hpp"

namespace permuquant {

using json = nlohmann::ordered_json;

namespace {

const char* fold_target_name(Predecessor p) {
    switch (p) {
        case Predecessor::linear: return "prev_linear_columns";
        case Predecessor::rmsnorm: return "norm_gamma";
        case Predecessor::layernorm_modulated: return "norm_modulation";
        case Predecessor::none: return "runtime_gather";
    }
    return "runtime_gather";
}

json layer_to_json(const LayerReport& row) {
    json j;
    j["name"] = row.name;
    j["status"] = row.ok ? "ok" : "failed";
    j["predecessor"] = predecessor_name(row.predecessor);
    if (!row.ok) {
        j["error"] = row.error;
        return j;
    }
    j["fold_target"] = fold_target_name(row.predecessor);
    j["accepted"] = row.accepted;
    j["alpha"] = row.alpha;
    j["e_orig"] = row.e_orig;
    j["e_reorder"] = row.e_reorder;
    j["rel_improvement"] = row.rel_improvement;
    j["perm"] = row.perm;
    json diag;
    diag["c_hat"] = row.c_hat;
    diag["degenerate_groups"] = row.degenerate_groups;
    diag["rho"] = row.rho;
    j["diagnostics"] = std::move(diag);
    return j;
}

LayerReport layer_from_json(const json& j) {
    LayerReport row;
    row.name = j.at("name").get<std::string>();
    const std::string status = j.at("status").get<std::string>();
    if (status != "ok" && status != "failed") {
        throw IoError("report: unknown layer status '" + status + "'");
    }
    row.ok = status == "ok";
    row.predecessor = predecessor_from_name(j.at("predecessor").get<std::string>());
    if (!row.ok) {
        row.error = j.at("error").get<std::string>();
        return row;
    }
    row.accepted = j.at("accepted").get<bool>();
    row.alpha = j.at("alpha").get<double>();
    row.e_orig = j.at("e_orig").get<double>();
    row.e_reorder = j.at("e_reorder").get<double>();
    row.rel_improvement = j.at("rel_improvement").get<double>();
    row.perm = j.at("perm").get<std::vector<std::size_t>>();
    const Permutation check(row.perm);  // rejects malformed stored permutations
    (void)check;
    const json& diag = j.at("diagnostics");
    row.c_hat = diag.at("c_hat").get<double>();
    row.degenerate_groups = diag.at("degenerate_groups").get<std::size_t>();
    row.rho = diag.at("rho").get<std::vector<double>>();
    return row;
}

}  // namespace

void CalibrationReport::recompute_totals() {
    total_layers = layers.size();
    ok_layers = 0;
    failed_layers = 0;
    accepted_layers = 0;
    e_orig_total = 0.0;
    e_deployed_total = 0.0;
    for (const LayerReport& row : layers) {
        if (!row.ok) {
            ++failed_layers;
            continue;
        }
        ++ok_layers;
        if (row.accepted) ++accepted_layers;
        e_orig_total += row.e_orig;
        e_deployed_total += row.accepted ? row.e_reorder : row.e_orig;
    }
    acceptance_rate = total_layers == 0
                          ? 0.0
                          : static_cast<double>(accepted_layers) /
                                static_cast<double>(total_layers);
}

std::string serialize_report(const CalibrationReport& report) {
    json j;
    json config;
    config["bits"] = report.bits;
    config["group_size"] = report.group_size;
    config["tau"] = report.tau;
    config["alpha_grid"] = report.alpha_grid;
    config["hadamard"] = report.hadamard;
    config["seed"] = report.seed;
    j["config"] = std::move(config);

    json totals;
    totals["layers"] = report.total_layers;
    totals["ok"] = report.ok_layers;
    totals["failed"] = report.failed_layers;
    totals["accepted"] = report.accepted_layers;
    totals["acceptance_rate"] = report.acceptance_rate;
    totals["e_orig_total"] = report.e_orig_total;
    totals["e_deployed_total"] = report.e_deployed_total;
    j["totals"] = std::move(totals);

    json layers = json::array();
    for (const LayerReport& row : report.layers) layers.push_back(layer_to_json(row));
    j["layers"] = std::move(layers);

    return j.dump(2) + "\n";
}

CalibrationReport parse_report(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& ex) {
        throw IoError(std::string("report: parse error: ") + ex.what());
    }
    try {
        CalibrationReport report;
        const json& config = j.at("config");
        report.bits = config.at("bits").get<int>();
        report.group_size = config.at("group_size").get<std::size_t>();
        report.tau = config.at("tau").get<double>();
        report.alpha_grid = config.at("alpha_grid").get<std::vector<double>>();
        report.hadamard = config.at("hadamard").get<bool>();
        report.seed = config.at("seed").get<std::uint64_t>();

        const json& totals = j.at("totals");
        report.total_layers = totals.at("layers").get<std::size_t>();
        report.ok_layers = totals.at("ok").get<std::size_t>();
        report.failed_layers = totals.at("failed").get<std::size_t>();
        report.accepted_layers = totals.at("accepted").get<std::size_t>();
        report.acceptance_rate = totals.at("acceptance_rate").get<double>();
        report.e_orig_total = totals.at("e_orig_total").get<double>();
        report.e_deployed_total = totals.at("e_deployed_total").get<double>();

        for (const json& row : j.at("layers")) {
            report.layers.push_back(layer_from_json(row));
        }
        return report;
    } catch (const json::exception& ex) {
        throw IoError(std::string("report: malformed document: ") + ex.what());
    } catch (const std::invalid_argument& ex) {
        throw IoError(std::string("report: malformed document: ") + ex.what());
    }
}

void save_report(const std::filesystem::path& path, const CalibrationReport& report) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("report: cannot create " + path.string());
    out << serialize_report(report);
    if (!out) throw IoError("report: write failed on " + path.string());
}

CalibrationReport load_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("report: cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_report(ss.str());
}

}  // namespace permuquant
