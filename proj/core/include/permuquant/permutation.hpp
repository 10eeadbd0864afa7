#pragma once

#include <cstddef>
#include <vector>

#include "permuquant/matrix.hpp"

namespace permuquant {

// Index permutation with both directions materialized:
// inverse()[forward()[i]] == i for all i.
class Permutation {
public:
    // forward must be a bijection on [0, n); throws std::invalid_argument.
    explicit Permutation(std::vector<std::size_t> forward);

    static Permutation identity(std::size_t n);

    std::size_t size() const { return forward_.size(); }
    const std::vector<std::size_t>& forward() const { return forward_; }
    const std::vector<std::size_t>& inverse() const { return inverse_; }

    Permutation inverted() const;
    bool is_identity() const;

    bool operator==(const Permutation&) const = default;

private:
    Permutation() = default;

    std::vector<std::size_t> forward_;
    std::vector<std::size_t> inverse_;
};

// Column gather: out(r, j) = x(r, forward[j]). Composed with apply_perm_rows
// on the weights this preserves the product: (X P)(P^T W) = X W.
Matrix apply_perm_cols(const Matrix& x, const Permutation& perm);

// Row gather: row j of the result is row forward[j] of w.
Matrix apply_perm_rows(const Matrix& w, const Permutation& perm);

}  // namespace permuquant
