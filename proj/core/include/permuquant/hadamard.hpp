#pragma once

#include <cstddef>
#include <span>

#include "permuquant/matrix.hpp"
#include "permuquant/permutation.hpp"

namespace permuquant {

// Largest power of two dividing d (the default transform block).
std::size_t largest_pow2_block(std::size_t d);

// In-place orthonormal Walsh-Hadamard transform applied blockwise.
// block must be a power of two and divide x.size(). The Sylvester matrix
// is symmetric, so with the 1/sqrt(block) scaling the transform is its
// own inverse.
void fwht_inplace(std::span<double> x, std::size_t block);

// X -> X H (transform each row) and W -> H^T W = H W (transform each column).
Matrix fwht_rows(const Matrix& x, std::size_t block);
Matrix fwht_cols(const Matrix& w, std::size_t block);

// Rotate first, then reorder in the rotated basis:
//   acts -> X H P,  weight -> P^T H W,  so their product still equals X W.
struct TransformedLayer {
    Matrix acts;
    Matrix weight;
};

TransformedLayer hadamard_then_reorder(const Matrix& acts, const Matrix& weight,
                                       const Permutation& perm, std::size_t block);

}  // namespace permuquant
