#include "permuquant/hadamard.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace permuquant {

std::size_t largest_pow2_block(std::size_t d) {
    if (d == 0) throw std::invalid_argument("hadamard: d must be positive");
    return d & (~d + 1);  // lowest set bit
}

void fwht_inplace(std::span<double> x, std::size_t block) {
    if (block == 0 || !std::has_single_bit(block)) {
        throw std::invalid_argument("hadamard: block must be a power of two");
    }
    if (x.size() % block != 0) {
        throw std::invalid_argument("hadamard: block must divide vector length");
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(block));
    for (std::size_t base = 0; base < x.size(); base += block) {
        for (std::size_t len = 1; len < block; len <<= 1) {
            for (std::size_t i = base; i < base + block; i += len << 1) {
                for (std::size_t j = i; j < i + len; ++j) {
                    const double u = x[j];
                    const double v = x[j + len];
                    x[j] = u + v;
                    x[j + len] = u - v;
                }
            }
        }
        for (std::size_t j = base; j < base + block; ++j) x[j] *= scale;
    }
}

Matrix fwht_rows(const Matrix& x, std::size_t block) {
    Matrix out = x;
    for (std::size_t r = 0; r < out.rows(); ++r) {
        fwht_inplace(out.row(r), block);
    }
    return out;
}

Matrix fwht_cols(const Matrix& w, std::size_t block) {
    if (w.rows() % block != 0) {
        throw std::invalid_argument("hadamard: block must divide rows");
    }
    Matrix out(w.rows(), w.cols());
    std::vector<double> column(w.rows());
    for (std::size_t c = 0; c < w.cols(); ++c) {
        for (std::size_t r = 0; r < w.rows(); ++r) column[r] = w(r, c);
        fwht_inplace(column, block);
        for (std::size_t r = 0; r < w.rows(); ++r) out(r, c) = column[r];
    }
    return out;
}

TransformedLayer hadamard_then_reorder(const Matrix& acts, const Matrix& weight,
                                       const Permutation& perm, std::size_t block) {
    if (acts.cols() != weight.rows()) {
        throw std::invalid_argument("hadamard_then_reorder: activation columns must match weight rows");
    }
    TransformedLayer out;
    out.acts = apply_perm_cols(fwht_rows(acts, block), perm);
    out.weight = apply_perm_rows(fwht_cols(weight, block), perm);
    return out;
}

}  // namespace permuquant
