#pragma once

#include <span>
#include <vector>

#include "permuquant/matrix.hpp"
#include "permuquant/permutation.hpp"

namespace permuquant {

enum class NormKind { rmsnorm, layernorm };

// rmsnorm:   y = x / sqrt(mean(x^2) + eps) * gamma     (gamma empty -> 1)
// layernorm: y = (x - mean) / sqrt(var + eps), then optionally modulated
//            elementwise as (1 + mod_scale) * y + mod_shift.
// gamma belongs to rmsnorm only; mod_scale/mod_shift to layernorm only,
// both present or both absent.
struct NormSpec {
    NormKind kind = NormKind::rmsnorm;
    std::vector<double> gamma;
    std::vector<double> mod_scale;
    std::vector<double> mod_shift;
    double eps = 1e-6;
};

std::vector<double> norm_apply(std::span<const double> x, const NormSpec& spec);
Matrix norm_apply_rows(const Matrix& x, const NormSpec& spec);

// Both norms commute with channel permutation once their elementwise
// parameters are gathered the same way: norm(x P; folded) = norm(x; spec) P.
NormSpec fold_perm_into_norm(const NormSpec& spec, const Permutation& perm);

// Absorb the permutation into the producing linear layer by gathering its
// output columns: X (W_prev P) = (X W_prev) P.
Matrix fold_perm_into_prev_linear(const Matrix& w_prev, const Permutation& perm);

}  // namespace permuquant
