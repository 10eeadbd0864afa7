#include "permuquant/reorder.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "permuquant/stats.hpp"

namespace permuquant {

const char* predecessor_name(Predecessor p) {
    switch (p) {
        case Predecessor::linear: return "linear";
        case Predecessor::rmsnorm: return "rmsnorm";
        case Predecessor::layernorm_modulated: return "layernorm_modulated";
        case Predecessor::none: return "none";
    }
    throw std::invalid_argument("predecessor_name: unknown value");
}

Predecessor predecessor_from_name(std::string_view name) {
    if (name == "linear") return Predecessor::linear;
    if (name == "rmsnorm") return Predecessor::rmsnorm;
    if (name == "layernorm_modulated") return Predecessor::layernorm_modulated;
    if (name == "none") return Predecessor::none;
    throw std::invalid_argument("predecessor_from_name: unknown predecessor '" +
                                std::string(name) + "'");
}

namespace {

void check_moments(std::span<const double> mu2, const char* who) {
    for (double v : mu2) {
        if (!std::isfinite(v) || v < 0.0) {
            throw std::invalid_argument(std::string(who) +
                                        ": moments must be finite and non-negative");
        }
    }
}

void check_layer(const LayerSpec& layer, const QuantConfig& cfg) {
    cfg.validate();
    if (layer.calib_acts.rows() == 0) {
        throw std::invalid_argument("layer: no calibration samples");
    }
    if (layer.calib_acts.cols() != layer.weight.rows()) {
        throw std::invalid_argument("layer: activation columns must match weight rows");
    }
    if (layer.weight.cols() == 0) {
        throw std::invalid_argument("layer: weight has no output channels");
    }
    if (layer.calib_acts.cols() % cfg.group_size != 0) {
        throw std::invalid_argument("layer: group size must divide d_in");
    }
}

double quantized_output_error(const Matrix& acts, const Matrix& weight,
                              const Permutation& perm, const QuantConfig& cfg,
                              const Matrix& reference) {
    Matrix xq = quantize_rows(apply_perm_cols(acts, perm), cfg);
    Matrix wq = quantize_cols(apply_perm_rows(weight, perm), cfg);
    return frobenius_distance_sq(matmul(xq, wq), reference);
}

}  // namespace

Permutation sort_by_moments(std::span<const double> mu2) {
    check_moments(mu2, "sort_by_moments");
    std::vector<std::size_t> idx(mu2.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    // stable: equal moments keep ascending original index
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return mu2[a] > mu2[b]; });
    return Permutation(std::move(idx));
}

PartitionSearch brute_force_min_proxy(std::span<const double> mu2, std::size_t group_size) {
    const std::size_t n = mu2.size();
    if (group_size == 0) throw std::invalid_argument("brute_force: group size must be positive");
    if (n == 0 || n % group_size != 0) {
        throw std::invalid_argument("brute_force: group size must divide d");
    }
    if (n > 14) throw std::invalid_argument("brute_force: d too large, limit is 14");
    check_moments(mu2, "brute_force");

    PartitionSearch search;
    std::vector<std::vector<std::size_t>> groups;
    std::vector<double> maxes;
    bool have_best = false;

    const std::uint32_t full = (1u << n) - 1u;

    // Canonical enumeration: each group is anchored by the smallest index
    // not yet assigned, so every set partition appears exactly once.
    std::function<void(std::uint32_t)> place;
    std::function<void(std::uint32_t, std::vector<std::size_t>&, std::size_t, std::size_t)> choose;

    place = [&](std::uint32_t used) {
        if (used == full) {
            ++search.partitions_examined;
            maxes.clear();
            for (const std::vector<std::size_t>& grp : groups) {
                double mx = 0.0;
                for (std::size_t i : grp) mx = std::max(mx, mu2[i]);
                maxes.push_back(mx);
            }
            // Summing in descending order makes the sorted partition's
            // objective bit-identical to proxy_objective on sorted moments.
            std::sort(maxes.begin(), maxes.end(), std::greater<double>());
            double value = 0.0;
            for (double v : maxes) value += v;
            if (!have_best || value < search.best_value) {
                have_best = true;
                search.best_value = value;
                search.best_groups = groups;
            }
            return;
        }
        std::size_t anchor = 0;
        while (used & (1u << anchor)) ++anchor;
        std::vector<std::size_t> group{anchor};
        choose(used | (1u << anchor), group, group_size - 1, anchor + 1);
    };

    choose = [&](std::uint32_t used, std::vector<std::size_t>& group, std::size_t need,
                 std::size_t start) {
        if (need == 0) {
            groups.push_back(group);
            place(used);
            groups.pop_back();
            return;
        }
        for (std::size_t i = start; i + need <= n; ++i) {
            if (used & (1u << i)) continue;
            group.push_back(i);
            choose(used | (1u << i), group, need - 1, i + 1);
            group.pop_back();
        }
    };

    place(0);
    return search;
}

std::vector<double> joint_scores(std::span<const double> mu2_act,
                                 std::span<const double> mu2_wt, double alpha) {
    if (mu2_act.size() != mu2_wt.size()) {
        throw std::invalid_argument("joint_scores: moment length mismatch");
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("joint_scores: alpha must be in [0, 1]");
    }
    check_moments(mu2_act, "joint_scores");
    check_moments(mu2_wt, "joint_scores");
    std::vector<double> v(mu2_act.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        // std::pow(0, 0) == 1, which is the convention the score needs at
        // the grid endpoints.
        v[i] = std::pow(mu2_act[i], alpha) * std::pow(mu2_wt[i], 1.0 - alpha);
    }
    return v;
}

double activation_quant_error(const Matrix& acts, const Permutation& perm,
                              const QuantConfig& cfg) {
    Matrix xp = apply_perm_cols(acts, perm);
    Matrix xq = quantize_rows(xp, cfg);
    return frobenius_distance_sq(xp, xq);
}

double layer_quant_error(const LayerSpec& layer, const Permutation& perm,
                         const QuantConfig& cfg) {
    check_layer(layer, cfg);
    if (perm.size() != layer.calib_acts.cols()) {
        throw std::invalid_argument("layer_quant_error: permutation size does not match d_in");
    }
    const Matrix reference = matmul(layer.calib_acts, layer.weight);
    return quantized_output_error(layer.calib_acts, layer.weight, perm, cfg, reference);
}

ReorderDecision select_permutation(const LayerSpec& layer, const QuantConfig& cfg,
                                   std::span<const double> alpha_grid, double tau) {
    check_layer(layer, cfg);
    if (alpha_grid.empty()) {
        throw std::invalid_argument("select_permutation: empty alpha grid");
    }
    for (double a : alpha_grid) {
        if (!(a >= 0.0 && a <= 1.0)) {
            throw std::invalid_argument("select_permutation: alpha must be in [0, 1]");
        }
    }
    if (!std::isfinite(tau)) {
        throw std::invalid_argument("select_permutation: tau must be finite");
    }

    const std::size_t d = layer.calib_acts.cols();
    const std::vector<double> mu2_act = channel_second_moments(layer.calib_acts).mu2;
    const std::vector<double> mu2_wt = row_second_moments(layer.weight);
    const Matrix reference = matmul(layer.calib_acts, layer.weight);

    const double e_orig = quantized_output_error(layer.calib_acts, layer.weight,
                                                 Permutation::identity(d), cfg, reference);

    bool have_best = false;
    double best_err = 0.0;
    double best_alpha = 0.0;
    Permutation best_perm = Permutation::identity(d);
    for (double alpha : alpha_grid) {
        Permutation cand = sort_by_moments(joint_scores(mu2_act, mu2_wt, alpha));
        const double err = quantized_output_error(layer.calib_acts, layer.weight,
                                                  cand, cfg, reference);
        // ties go to the smaller alpha no matter the grid order
        if (!have_best || err < best_err || (err == best_err && alpha < best_alpha)) {
            have_best = true;
            best_err = err;
            best_alpha = alpha;
            best_perm = std::move(cand);
        }
    }

    ReorderDecision dec;
    dec.alpha = best_alpha;
    dec.e_orig = e_orig;
    dec.e_reorder = best_err;
    dec.rel_improvement = e_orig > 0.0 ? (e_orig - best_err) / e_orig : 0.0;
    dec.accepted = e_orig > 0.0 && dec.rel_improvement > tau;
    dec.perm = dec.accepted ? best_perm : Permutation::identity(d);
    return dec;
}

}  // namespace permuquant
