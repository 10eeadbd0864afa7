#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "permuquant/matrix.hpp"
#include "permuquant/rng.hpp"

namespace pq = permuquant;

namespace {

// Deliberately different loop nest (i-j-k with a scalar accumulator) so a
// bitwise comparison catches any reordering or contraction in matmul.
pq::Matrix reference_matmul(const pq::Matrix& a, const pq::Matrix& b) {
    pq::Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
            c(i, j) = acc;
        }
    }
    return c;
}

}  // namespace

TEST_CASE("matmul matches a hand example") {
    const pq::Matrix a(1, 2, {1.0, 2.0});
    const pq::Matrix b(2, 1, {3.0, 4.0});
    const pq::Matrix c = pq::matmul(a, b);
    CHECK(c.rows() == 1);
    CHECK(c.cols() == 1);
    CHECK(c(0, 0) == 11.0);
}

TEST_CASE("matmul is bitwise identical to an independent loop nest") {
    pq::Rng rng(31);
    for (int t = 0; t < 20; ++t) {
        const std::size_t n = 1 + rng.index(17);
        const std::size_t k = 1 + rng.index(23);
        const std::size_t m = 1 + rng.index(13);
        pq::Matrix a(n, k);
        pq::Matrix b(k, m);
        for (double& v : a.data()) v = rng.normal();
        for (double& v : b.data()) v = rng.normal();
        // sprinkle zeros to exercise the skip path
        for (int z = 0; z < 5; ++z) a.data()[rng.index(a.size())] = 0.0;
        const pq::Matrix got = pq::matmul(a, b);
        const pq::Matrix want = reference_matmul(a, b);
        REQUIRE(got == want);
    }
}

TEST_CASE("matmul rejects shape mismatches") {
    const pq::Matrix a(2, 3);
    const pq::Matrix b(2, 3);
    CHECK_THROWS_AS(pq::matmul(a, b), std::invalid_argument);
}

TEST_CASE("frobenius distance is the sum of squared differences") {
    const pq::Matrix a(2, 2, {1.0, 2.0, 3.0, 4.0});
    const pq::Matrix b(2, 2, {1.0, 0.0, 3.0, 1.0});
    CHECK(pq::frobenius_distance_sq(a, b) == 13.0);
    CHECK(pq::frobenius_distance_sq(a, a) == 0.0);
}

TEST_CASE("frobenius distance rejects shape mismatches") {
    CHECK_THROWS_AS(pq::frobenius_distance_sq(pq::Matrix(1, 2), pq::Matrix(2, 1)),
                    std::invalid_argument);
}

TEST_CASE("matrix constructors validate their input") {
    CHECK_THROWS_AS(pq::Matrix(2, 2, {1.0, 2.0, 3.0}), std::invalid_argument);
    CHECK_THROWS_AS(pq::Matrix(1, 1, {std::numeric_limits<double>::quiet_NaN()}),
                    std::invalid_argument);
    CHECK_THROWS_AS(pq::Matrix(1, 1, {std::numeric_limits<double>::infinity()}),
                    std::invalid_argument);
    const pq::Matrix zero(3, 4);
    CHECK(zero.size() == 12);
    for (double v : zero.data()) CHECK(v == 0.0);
}
