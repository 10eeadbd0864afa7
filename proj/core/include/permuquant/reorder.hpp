#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "permuquant/matrix.hpp"
#include "permuquant/permutation.hpp"
#include "permuquant/quant.hpp"

namespace permuquant {

// What feeds this layer's input. Determines where an accepted permutation
// gets folded: a preceding linear absorbs it into its output columns, a
// norm into its elementwise parameters; none means a runtime gather.
enum class Predecessor { linear, rmsnorm, layernorm_modulated, none };

const char* predecessor_name(Predecessor p);
Predecessor predecessor_from_name(std::string_view name);  // throws std::invalid_argument

struct LayerSpec {
    Matrix weight;      // d_in x d_out
    Matrix calib_acts;  // n x d_in calibration activations
    Predecessor predecessor = Predecessor::linear;
};

// Outcome of the calibration-time permutation search for one layer.
// perm is what gets deployed: the winning candidate if accepted, the
// identity otherwise. e_reorder is always the best candidate's error.
struct ReorderDecision {
    Permutation perm = Permutation::identity(0);
    double alpha = 0.0;
    double e_orig = 0.0;
    double e_reorder = 0.0;
    double rel_improvement = 0.0;  // (e_orig - e_reorder) / e_orig, 0 when e_orig == 0
    bool accepted = false;
};

// Descending argsort of the channel moments; ties keep ascending original
// index. Moments must be finite and non-negative.
Permutation sort_by_moments(std::span<const double> mu2);

// Exhaustive minimum of the proxy objective over all partitions of d
// channels into groups of g (not just contiguous ones). Exponential;
// guarded to d <= 14.
struct PartitionSearch {
    double best_value = 0.0;
    std::vector<std::vector<std::size_t>> best_groups;
    std::size_t partitions_examined = 0;
};

PartitionSearch brute_force_min_proxy(std::span<const double> mu2, std::size_t group_size);

// Joint activation/weight channel score v_i = a_i^alpha * w_i^(1-alpha)
// with 0^0 = 1. alpha in [0, 1]; moments non-negative.
std::vector<double> joint_scores(std::span<const double> mu2_act,
                                 std::span<const double> mu2_wt, double alpha);

// ||X P' - Q(X P')||^2 where P' gathers columns of the calibration
// activations; quantization is per row.
double activation_quant_error(const Matrix& acts, const Permutation& perm,
                              const QuantConfig& cfg);

// ||Q(X P) Q(P^T W) - X W||_F^2 over the calibration batch.
double layer_quant_error(const LayerSpec& layer, const Permutation& perm,
                         const QuantConfig& cfg);

// Grid search over alpha: sort channels by joint score, measure the layer
// error of each candidate, keep the best (ties go to the smaller alpha),
// and accept only if the relative improvement over identity strictly
// exceeds tau.
ReorderDecision select_permutation(const LayerSpec& layer, const QuantConfig& cfg,
                                   std::span<const double> alpha_grid, double tau);

}  // namespace permuquant
