#include "permuquant/matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace permuquant {

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw std::invalid_argument("matrix: data length does not match rows*cols");
    }
    for (double v : data_) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("matrix: non-finite entry");
        }
    }
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("matmul: inner dimensions disagree");
    }
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) {
                out(i, j) += aik * b(k, j);
            }
        }
    }
    return out;
}

double frobenius_distance_sq(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("frobenius_distance_sq: shape mismatch");
    }
    double sum = 0.0;
    const std::vector<double>& da = a.data();
    const std::vector<double>& db = b.data();
    for (std::size_t i = 0; i < da.size(); ++i) {
        const double diff = da[i] - db[i];
        sum += diff * diff;
    }
    return sum;
}

}  // namespace permuquant
