#include "permuquant/quant.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace permuquant {

void QuantConfig::validate() const {
    if (bits < 2 || bits > 8) {
        throw std::invalid_argument("quant: bits must be in [2, 8]");
    }
    if (group_size == 0) {
        throw std::invalid_argument("quant: group size must be positive");
    }
}

double group_scale(std::span<const double> group, int qmax) {
    if (group.empty()) throw std::invalid_argument("quant: empty group");
    if (qmax < 1) throw std::invalid_argument("quant: qmax must be >= 1");
    double absmax = 0.0;
    for (double v : group) absmax = std::max(absmax, std::fabs(v));
    return absmax / qmax;
}

QuantizedVector quantize_dequantize(std::span<const double> x, const QuantConfig& cfg) {
    cfg.validate();
    const std::size_t g = cfg.group_size;
    if (x.size() % g != 0) {
        throw std::invalid_argument("quant: group size must divide vector length");
    }
    const int qmax = cfg.qmax();

    QuantizedVector out;
    out.codes.assign(x.size(), 0);
    out.values.assign(x.size(), 0.0);
    out.scales.reserve(x.size() / g);

    for (std::size_t base = 0; base < x.size(); base += g) {
        double absmax = 0.0;
        for (std::size_t i = base; i < base + g; ++i) {
            absmax = std::max(absmax, std::fabs(x[i]));
        }
        const double scale = absmax / qmax;
        out.scales.push_back(scale);
        if (scale == 0.0) continue;  // all-zero group: codes and values stay 0

        for (std::size_t i = base; i < base + g; ++i) {
            // std::round halves go away from zero, as required.
            double z = std::round(x[i] / scale);
            z = std::clamp(z, static_cast<double>(-qmax), static_cast<double>(qmax));
            out.codes[i] = static_cast<std::int8_t>(z);
            // Dequantize absmax*z/qmax with one rounding (the product is
            // exact in extended precision). The max-magnitude element then
            // maps back to absmax itself, which makes requantizing the
            // output reproduce the identical scale, codes and values.
            out.values[i] = static_cast<double>(
                static_cast<long double>(absmax) * static_cast<long double>(z) /
                static_cast<long double>(qmax));
        }
    }
    return out;
}

double quant_error(std::span<const double> x, std::span<const double> x_hat) {
    if (x.size() != x_hat.size()) {
        throw std::invalid_argument("quant_error: length mismatch");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double diff = x[i] - x_hat[i];
        sum += diff * diff;
    }
    return sum;
}

double error_upper_bound(std::span<const double> x, const Grouping& grouping, int qmax) {
    if (x.size() != grouping.d()) {
        throw std::invalid_argument("error_upper_bound: vector length does not match grouping");
    }
    if (qmax < 1) throw std::invalid_argument("error_upper_bound: qmax must be >= 1");
    double sum_max_sq = 0.0;
    for (std::size_t k = 0; k < grouping.num_groups(); ++k) {
        double max_sq = 0.0;
        for (std::size_t i = grouping.begin(k); i < grouping.end(k); ++i) {
            max_sq = std::max(max_sq, x[i] * x[i]);
        }
        sum_max_sq += max_sq;
    }
    const double q2 = static_cast<double>(qmax) * static_cast<double>(qmax);
    return static_cast<double>(grouping.g()) / (4.0 * q2) * sum_max_sq;
}

Matrix quantize_rows(const Matrix& x, const QuantConfig& cfg) {
    cfg.validate();
    if (x.cols() % cfg.group_size != 0) {
        throw std::invalid_argument("quantize_rows: group size must divide columns");
    }
    Matrix out(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        QuantizedVector q = quantize_dequantize(x.row(r), cfg);
        std::copy(q.values.begin(), q.values.end(), out.row(r).begin());
    }
    return out;
}

Matrix quantize_cols(const Matrix& w, const QuantConfig& cfg) {
    cfg.validate();
    if (w.rows() % cfg.group_size != 0) {
        throw std::invalid_argument("quantize_cols: group size must divide rows");
    }
    Matrix out(w.rows(), w.cols());
    std::vector<double> column(w.rows());
    for (std::size_t c = 0; c < w.cols(); ++c) {
        for (std::size_t r = 0; r < w.rows(); ++r) column[r] = w(r, c);
        QuantizedVector q = quantize_dequantize(column, cfg);
        for (std::size_t r = 0; r < w.rows(); ++r) out(r, c) = q.values[r];
    }
    return out;
}

}  // namespace permuquant
