#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace permuquant {

// Dense row-major matrix of doubles. Constructors that take data reject
// non-finite entries; arithmetic keeps them finite at the scales we run.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols);  // zero-filled
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) {
        assert(r < rows_ && c < cols_);
        return data_[r * cols_ + c];
    }
    double operator()(std::size_t r, std::size_t c) const {
        assert(r < rows_ && c < cols_);
        return data_[r * cols_ + c];
    }

    std::span<double> row(std::size_t r) {
        assert(r < rows_);
        return {data_.data() + r * cols_, cols_};
    }
    std::span<const double> row(std::size_t r) const {
        assert(r < rows_);
        return {data_.data() + r * cols_, cols_};
    }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// C = A * B with a fixed i-k-j loop nest; each C(i,j) accumulates its k
// terms in ascending order, so results are reproducible run to run.
Matrix matmul(const Matrix& a, const Matrix& b);

// Sum of squared entrywise differences (squared Frobenius distance),
// accumulated in row-major order.
double frobenius_distance_sq(const Matrix& a, const Matrix& b);

}  // namespace permuquant
