#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "permuquant/grouping.hpp"
#include "permuquant/matrix.hpp"

namespace permuquant {

enum class Rounding { half_away_from_zero };

struct QuantConfig {
    int bits = 3;  // 2..8
    std::size_t group_size = 32;
    Rounding rounding = Rounding::half_away_from_zero;

    // Largest code magnitude: 2^(bits-1) - 1.
    int qmax() const { return (1 << (bits - 1)) - 1; }
    void validate() const;  // throws std::invalid_argument
};

// Symmetric per-group quantization of one vector. Codes lie in
// [-qmax, qmax]; an all-zero group gets scale 0 and codes 0.
struct QuantizedVector {
    std::vector<std::int8_t> codes;
    std::vector<double> scales;  // one per group: absmax / qmax
    std::vector<double> values;  // dequantized: scale * code
};

// absmax / qmax over one group; 0 for an all-zero group.
// Throws std::invalid_argument on an empty group or qmax < 1.
double group_scale(std::span<const double> group, int qmax);

// Round-to-nearest with halves away from zero, clip to [-qmax, qmax],
// dequantize. group_size must divide x.size().
QuantizedVector quantize_dequantize(std::span<const double> x, const QuantConfig& cfg);

// ||x - x_hat||^2, accumulated left to right.
double quant_error(std::span<const double> x, std::span<const double> x_hat);

// Worst-case rounding bound: g/(4 qmax^2) * sum_k max_{i in G_k} x_i^2.
double error_upper_bound(std::span<const double> x, const Grouping& grouping, int qmax);

// Fake quantization of whole matrices. Rows: each row is quantized
// independently with groups running along the row (per-token activations).
// Cols: each column independently with groups running down the column
// (per-output-channel weights, grouped along the input dimension).
Matrix quantize_rows(const Matrix& x, const QuantConfig& cfg);
Matrix quantize_cols(const Matrix& w, const QuantConfig& cfg);

}  // namespace permuquant
