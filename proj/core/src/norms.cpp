#include "permuquant/norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace permuquant {

namespace {

void check_spec(const NormSpec& spec, std::size_t d) {
    if (!(spec.eps >= 0.0) || !std::isfinite(spec.eps)) {
        throw std::invalid_argument("norm: eps must be finite and non-negative");
    }
    if (spec.mod_scale.size() != spec.mod_shift.size()) {
        throw std::invalid_argument("norm: modulation scale and shift must come together");
    }
    if (spec.kind == NormKind::rmsnorm) {
        if (!spec.mod_scale.empty()) {
            throw std::invalid_argument("norm: modulation belongs to layernorm");
        }
        if (!spec.gamma.empty() && spec.gamma.size() != d) {
            throw std::invalid_argument("norm: gamma length must match the vector");
        }
    } else {
        if (!spec.gamma.empty()) {
            throw std::invalid_argument("norm: gamma belongs to rmsnorm");
        }
        if (!spec.mod_scale.empty() && spec.mod_scale.size() != d) {
            throw std::invalid_argument("norm: modulation length must match the vector");
        }
    }
}

std::vector<double> gather(const std::vector<double>& v, const Permutation& perm) {
    if (v.empty()) return v;
    if (v.size() != perm.size()) {
        throw std::invalid_argument("fold_perm_into_norm: parameter length does not match permutation");
    }
    const std::vector<std::size_t>& f = perm.forward();
    std::vector<double> out(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) out[j] = v[f[j]];
    return out;
}

}  // namespace

std::vector<double> norm_apply(std::span<const double> x, const NormSpec& spec) {
    if (x.empty()) throw std::invalid_argument("norm: empty vector");
    check_spec(spec, x.size());
    const std::size_t d = x.size();
    std::vector<double> y(d);

    if (spec.kind == NormKind::rmsnorm) {
        double ms = 0.0;
        for (double v : x) ms += v * v;
        ms /= static_cast<double>(d);
        const double inv = 1.0 / std::sqrt(ms + spec.eps);
        for (std::size_t i = 0; i < d; ++i) {
            y[i] = x[i] * inv;
            if (!spec.gamma.empty()) y[i] *= spec.gamma[i];
        }
        return y;
    }

    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= static_cast<double>(d);
    const double inv = 1.0 / std::sqrt(var + spec.eps);
    for (std::size_t i = 0; i < d; ++i) {
        y[i] = (x[i] - mean) * inv;
        if (!spec.mod_scale.empty()) {
            y[i] = (1.0 + spec.mod_scale[i]) * y[i] + spec.mod_shift[i];
        }
    }
    return y;
}

Matrix norm_apply_rows(const Matrix& x, const NormSpec& spec) {
    Matrix out(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const std::vector<double> y = norm_apply(x.row(r), spec);
        std::copy(y.begin(), y.end(), out.row(r).begin());
    }
    return out;
}

NormSpec fold_perm_into_norm(const NormSpec& spec, const Permutation& perm) {
    check_spec(spec, perm.size());
    NormSpec folded = spec;
    folded.gamma = gather(spec.gamma, perm);
    folded.mod_scale = gather(spec.mod_scale, perm);
    folded.mod_shift = gather(spec.mod_shift, perm);
    return folded;
}

Matrix fold_perm_into_prev_linear(const Matrix& w_prev, const Permutation& perm) {
    return apply_perm_cols(w_prev, perm);
}

}  // namespace permuquant
