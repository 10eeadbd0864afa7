#include "permuquant/permutation.hpp"

#include <stdexcept>

namespace permuquant {

Permutation::Permutation(std::vector<std::size_t> forward) : forward_(std::move(forward)) {
    const std::size_t n = forward_.size();
    inverse_.assign(n, n);  // n marks "unset"
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t f = forward_[i];
        if (f >= n || inverse_[f] != n) {
            throw std::invalid_argument("permutation: forward map is not a bijection");
        }
        inverse_[f] = i;
    }
}

Permutation Permutation::identity(std::size_t n) {
    Permutation p;
    p.forward_.resize(n);
    p.inverse_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        p.forward_[i] = i;
        p.inverse_[i] = i;
    }
    return p;
}

Permutation Permutation::inverted() const {
    Permutation p;
    p.forward_ = inverse_;
    p.inverse_ = forward_;
    return p;
}

bool Permutation::is_identity() const {
    for (std::size_t i = 0; i < forward_.size(); ++i) {
        if (forward_[i] != i) return false;
    }
    return true;
}

Matrix apply_perm_cols(const Matrix& x, const Permutation& perm) {
    if (x.cols() != perm.size()) {
        throw std::invalid_argument("apply_perm_cols: permutation size does not match columns");
    }
    const std::vector<std::size_t>& f = perm.forward();
    Matrix out(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        for (std::size_t j = 0; j < x.cols(); ++j) {
            out(r, j) = x(r, f[j]);
        }
    }
    return out;
}

Matrix apply_perm_rows(const Matrix& w, const Permutation& perm) {
    if (w.rows() != perm.size()) {
        throw std::invalid_argument("apply_perm_rows: permutation size does not match rows");
    }
    const std::vector<std::size_t>& f = perm.forward();
    Matrix out(w.rows(), w.cols());
    for (std::size_t j = 0; j < w.rows(); ++j) {
        for (std::size_t c = 0; c < w.cols(); ++c) {
            out(j, c) = w(f[j], c);
        }
    }
    return out;
}

}  // namespace permuquant
