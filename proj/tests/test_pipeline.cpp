#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <unistd.h>
#include <vector>

#include "doctest.h"
#include "permuquant/calibrate.hpp"
#include "permuquant/manifest.hpp"
#include "permuquant/matrix.hpp"
#include "permuquant/report.hpp"
#include "permuquant/rng.hpp"
#include "permuquant/synthetic.hpp"
#include "permuquant/tensor_io.hpp"

namespace pq = permuquant;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("permuquant_pipe_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

struct LayerInput {
    std::string name;
    pq::Matrix acts;
    pq::Matrix weight;
    pq::Predecessor predecessor = pq::Predecessor::linear;
};

pq::Manifest write_layers(const fs::path& dir, const std::vector<LayerInput>& layers) {
    fs::create_directories(dir / "tensors");
    pq::Manifest m;
    for (const LayerInput& l : layers) {
        const std::string acts_rel = "tensors/" + l.name + "_acts.pqt";
        const std::string weight_rel = "tensors/" + l.name + "_weight.pqt";
        pq::save_tensor(dir / acts_rel, l.acts);
        pq::save_tensor(dir / weight_rel, l.weight);
        pq::ManifestEntry e;
        e.name = l.name;
        e.acts_path = acts_rel;
        e.weight_path = weight_rel;
        e.predecessor = l.predecessor;
        m.layers.push_back(e);
    }
    pq::save_manifest(dir / "manifest.json", m);
    return pq::load_manifest(dir / "manifest.json");
}

pq::CalibrateOptions small_options(std::size_t group_size) {
    pq::CalibrateOptions opt;
    opt.quant.bits = 3;
    opt.quant.group_size = group_size;
    opt.alpha_grid = {0.0, 0.5, 1.0};
    return opt;
}

// independent scalar reference for the identity-permutation layer error
double oracle_identity_error(const pq::Matrix& x, const pq::Matrix& w, int bits,
                             std::size_t g) {
    const int q = (1 << (bits - 1)) - 1;
    auto qdq_span = [&](std::vector<double> vals) {
        for (std::size_t base = 0; base < vals.size(); base += g) {
            double absmax = 0.0;
            for (std::size_t i = base; i < base + g; ++i) {
                absmax = std::max(absmax, std::fabs(vals[i]));
            }
            const double s = absmax / q;
            for (std::size_t i = base; i < base + g; ++i) {
                if (s == 0.0) {
                    vals[i] = 0.0;
                    continue;
                }
                double z = std::round(vals[i] / s);
                z = std::min(std::max(z, static_cast<double>(-q)), static_cast<double>(q));
                vals[i] = static_cast<double>(static_cast<long double>(absmax) *
                                              static_cast<long double>(z) /
                                              static_cast<long double>(q));
            }
        }
        return vals;
    };

    pq::Matrix qx(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        std::vector<double> row(x.row(r).begin(), x.row(r).end());
        const std::vector<double> qrow = qdq_span(std::move(row));
        for (std::size_t c = 0; c < x.cols(); ++c) qx(r, c) = qrow[c];
    }
    pq::Matrix qw(w.rows(), w.cols());
    for (std::size_t c = 0; c < w.cols(); ++c) {
        std::vector<double> col(w.rows());
        for (std::size_t r = 0; r < w.rows(); ++r) col[r] = w(r, c);
        const std::vector<double> qcol = qdq_span(std::move(col));
        for (std::size_t r = 0; r < w.rows(); ++r) qw(r, c) = qcol[r];
    }

    double err = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < w.cols(); ++j) {
            double ref = 0.0;
            double approx = 0.0;
            for (std::size_t k = 0; k < x.cols(); ++k) {
                ref += x(i, k) * w(k, j);
                approx += qx(i, k) * qw(k, j);
            }
            err += (approx - ref) * (approx - ref);
        }
    }
    return err;
}

}  // namespace

TEST_CASE("a lossless layer is recorded as rejected with zero baseline error") {
    TempDir dir;
    const pq::Matrix acts(2, 4, {3.0, 1.0, -3.0, 2.0, 1.0, 3.0, 0.0, -3.0});
    const pq::Matrix weight(4, 2, {3.0, -1.0, 1.0, 3.0, -3.0, 2.0, 2.0, 3.0});
    const pq::Manifest m = write_layers(dir.path, {{"exact", acts, weight}});

    const pq::CalibrationReport report = pq::calibrate(m, small_options(2));
    REQUIRE(report.layers.size() == 1);
    const pq::LayerReport& row = report.layers[0];
    CHECK(row.ok);
    CHECK(row.e_orig == 0.0);
    CHECK_FALSE(row.accepted);
    CHECK(row.rel_improvement == 0.0);
    CHECK(row.perm == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK(report.accepted_layers == 0);
    CHECK(report.e_deployed_total == 0.0);
}

TEST_CASE("a two-population layer is accepted with a real improvement") {
    TempDir dir;
    pq::Rng rng(81);
    LayerInput l;
    l.name = "twopop";
    l.acts = pq::two_population_activations(rng, 64, 16, 100.0);
    l.weight = pq::gaussian_weights(rng, 16, 8, 0.0);
    const pq::Manifest m = write_layers(dir.path, {l});

    const pq::CalibrationReport report = pq::calibrate(m, small_options(8));
    const pq::LayerReport& row = report.layers[0];
    REQUIRE(row.ok);
    CHECK(row.accepted);
    CHECK(row.e_reorder < row.e_orig);
    CHECK(row.rel_improvement > 0.0);
    CHECK(row.perm != std::vector<std::size_t>({0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12,
                                                13, 14, 15}));
    CHECK(report.accepted_layers == 1);
    CHECK(report.acceptance_rate == 1.0);
    CHECK(row.c_hat > 0.0);
    CHECK(row.rho.size() == 2);
    CHECK(row.degenerate_groups == 0);
}

TEST_CASE("default options are echoed verbatim in the report") {
    TempDir dir;
    pq::Rng rng(82);
    LayerInput l;
    l.name = "echo";
    l.acts = pq::heavy_tailed_activations(rng, 32, 64, 1.0);
    l.weight = pq::gaussian_weights(rng, 64, 8, 0.5);
    const pq::Manifest m = write_layers(dir.path, {l});

    const pq::CalibrationReport report = pq::calibrate(m, pq::CalibrateOptions{});
    CHECK(report.bits == 3);
    CHECK(report.group_size == 32);
    CHECK(report.tau == 0.0);
    CHECK(report.alpha_grid == std::vector<double>{0.0, 0.2, 0.4, 0.6, 0.8, 1.0});
    CHECK(report.hadamard == false);

    const std::string text = pq::serialize_report(report);
    CHECK(text.find("\"bits\": 3") != std::string::npos);
    CHECK(text.find("\"group_size\": 32") != std::string::npos);
    CHECK(text.find("0.2") != std::string::npos);
    CHECK(text.find("0.8") != std::string::npos);
}

TEST_CASE("layer parallelism does not change a single byte of the report") {
    TempDir dir;
    pq::SyntheticConfig cfg;
    cfg.layers = 6;
    cfg.d = 64;
    cfg.d_out = 16;
    cfg.tokens = 48;
    cfg.seed = 83;
    pq::write_synthetic_dataset(dir.path, cfg);
    const pq::Manifest m = pq::load_manifest(dir.path / "manifest.json");

    pq::CalibrateOptions serial = small_options(32);
    serial.jobs = 1;
    pq::CalibrateOptions parallel = small_options(32);
    parallel.jobs = 4;

    const std::string a = pq::serialize_report(pq::calibrate(m, serial));
    const std::string b = pq::serialize_report(pq::calibrate(m, parallel));
    CHECK(a == b);
}

TEST_CASE("evaluate is a fixed point of calibrate") {
    TempDir dir;
    pq::SyntheticConfig cfg;
    cfg.layers = 4;
    cfg.d = 16;
    cfg.d_out = 8;
    cfg.tokens = 32;
    cfg.seed = 84;
    pq::write_synthetic_dataset(dir.path, cfg);
    const pq::Manifest m = pq::load_manifest(dir.path / "manifest.json");

    for (const bool hadamard : {false, true}) {
        pq::CalibrateOptions opt = small_options(8);
        opt.hadamard = hadamard;
        const pq::CalibrationReport report = pq::calibrate(m, opt);
        const pq::EvalResult result = pq::evaluate(m, report);
        CHECK(result.all_match);
        REQUIRE(result.rows.size() == 4);
        for (const pq::EvalRow& row : result.rows) {
            CHECK(row.ok);
            CHECK(row.match);
            CHECK(row.e_recomputed == doctest::Approx(row.e_stored).epsilon(1e-9));
        }
    }
}

TEST_CASE("a layer the group size cannot divide fails alone, not globally") {
    TempDir dir;
    pq::Rng rng(85);
    LayerInput good;
    good.name = "good";
    good.acts = pq::heavy_tailed_activations(rng, 24, 16, 1.0);
    good.weight = pq::gaussian_weights(rng, 16, 4, 0.5);
    LayerInput bad;
    bad.name = "undivisible";
    bad.acts = pq::heavy_tailed_activations(rng, 24, 12, 1.0);
    bad.weight = pq::gaussian_weights(rng, 12, 4, 0.5);
    const pq::Manifest m = write_layers(dir.path, {good, bad});

    const pq::CalibrationReport report = pq::calibrate(m, small_options(8));
    REQUIRE(report.layers.size() == 2);
    CHECK(report.layers[0].ok);
    CHECK_FALSE(report.layers[1].ok);
    CHECK(report.layers[1].error.find("group") != std::string::npos);
    CHECK(report.ok_layers == 1);
    CHECK(report.failed_layers == 1);

    // the failed row passes through evaluation untouched
    const pq::EvalResult result = pq::evaluate(m, report);
    CHECK(result.all_match);
    REQUIRE(result.rows.size() == 2);
    CHECK_FALSE(result.rows[1].ok);
    CHECK(result.rows[1].match);
    CHECK(result.rows[1].note.find("skipped") != std::string::npos);
}

TEST_CASE("the stored baseline error matches an independent scalar oracle") {
    TempDir dir;
    LayerInput l;
    l.name = "hand";
    l.acts = pq::Matrix(2, 4, {0.7, 0.3, -1.1, 2.2, 1.9, -0.4, 0.6, -2.5});
    l.weight = pq::Matrix(4, 2, {1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0, 1.0});
    const pq::Manifest m = write_layers(dir.path, {l});

    // flat weight moments and alpha 0 make the only candidate the identity,
    // so the layer is rejected and deploys the identity permutation
    pq::CalibrateOptions opt = small_options(2);
    opt.alpha_grid = {0.0};
    const pq::CalibrationReport report = pq::calibrate(m, opt);
    const pq::LayerReport& row = report.layers[0];
    REQUIRE(row.ok);
    CHECK_FALSE(row.accepted);
    CHECK(row.perm == std::vector<std::size_t>{0, 1, 2, 3});

    const double oracle = oracle_identity_error(l.acts, l.weight, 3, 2);
    CHECK(row.e_orig == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(row.e_reorder == doctest::Approx(oracle).epsilon(1e-12));

    // and evaluate agrees with the oracle through the stored report
    const pq::EvalResult result = pq::evaluate(m, report);
    CHECK(result.all_match);
    CHECK(result.rows[0].e_recomputed == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("evaluate rejects reports that no longer fit the manifest") {
    TempDir dir;
    pq::Rng rng(86);
    LayerInput l;
    l.name = "layer";
    l.acts = pq::heavy_tailed_activations(rng, 16, 8, 1.0);
    l.weight = pq::gaussian_weights(rng, 8, 4, 0.5);
    const pq::Manifest m = write_layers(dir.path, {l});
    const pq::CalibrationReport report = pq::calibrate(m, small_options(4));

    pq::CalibrationReport ghost = report;
    ghost.layers[0].name = "ghost";
    CHECK_THROWS_AS(pq::evaluate(m, ghost), pq::IoError);

    pq::CalibrationReport stale = report;
    stale.layers[0].perm = {2, 0, 1};
    CHECK_THROWS_AS(pq::evaluate(m, stale), pq::IoError);
}

TEST_CASE("rotation changes the report only through the transformed basis") {
    TempDir dir;
    pq::Rng rng(87);
    LayerInput l;
    l.name = "rot";
    l.acts = pq::two_population_activations(rng, 48, 16, 64.0);
    l.weight = pq::gaussian_weights(rng, 16, 8, 0.5);
    const pq::Manifest m = write_layers(dir.path, {l});

    pq::CalibrateOptions plain = small_options(8);
    pq::CalibrateOptions rotated = small_options(8);
    rotated.hadamard = true;

    const pq::CalibrationReport a = pq::calibrate(m, plain);
    const pq::CalibrationReport b = pq::calibrate(m, rotated);
    CHECK(a.hadamard == false);
    CHECK(b.hadamard == true);
    // the decisions are measured in different bases
    CHECK(a.layers[0].e_orig != b.layers[0].e_orig);
    // deployment in either basis never regresses past its own baseline
    const auto deployed = [](const pq::LayerReport& r) {
        return r.accepted ? r.e_reorder : r.e_orig;
    };
    CHECK(deployed(a.layers[0]) <= a.layers[0].e_orig);
    CHECK(deployed(b.layers[0]) <= b.layers[0].e_orig);
}
