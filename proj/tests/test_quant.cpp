#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "permuquant/grouping.hpp"
#include "permuquant/quant.hpp"
#include "permuquant/rng.hpp"

namespace pq = permuquant;

namespace {

pq::QuantConfig make_cfg(int bits, std::size_t g) {
    pq::QuantConfig cfg;
    cfg.bits = bits;
    cfg.group_size = g;
    return cfg;
}

}  // namespace

TEST_CASE("three-bit worked example") {
    const std::vector<double> x = {0.5, -2.0, 1.0, 3.0};
    const pq::QuantizedVector q = pq::quantize_dequantize(x, make_cfg(3, 4));
    REQUIRE(q.scales.size() == 1);
    CHECK(q.scales[0] == 1.0);
    CHECK(q.codes == std::vector<std::int8_t>{1, -2, 1, 3});
    CHECK(q.values == std::vector<double>{1.0, -2.0, 1.0, 3.0});
    CHECK(pq::quant_error(x, q.values) == 0.25);
}

TEST_CASE("halves round away from zero") {
    const std::vector<double> x = {-0.5, 1.5, 2.5, 3.0};
    const pq::QuantizedVector q = pq::quantize_dequantize(x, make_cfg(3, 4));
    CHECK(q.codes == std::vector<std::int8_t>{-1, 2, 3, 3});
}

TEST_CASE("values already on the grid are reproduced bitwise") {
    const std::vector<double> x = {3.0, -1.0, 0.0, 2.0, -3.0, 3.0, 1.0, -2.0};
    const pq::QuantizedVector q = pq::quantize_dequantize(x, make_cfg(3, 4));
    CHECK(q.values == x);
    CHECK(pq::quant_error(x, q.values) == 0.0);
}

TEST_CASE("quantization is idempotent down to the bit") {
    pq::Rng rng(11);
    const pq::QuantConfig cfg = make_cfg(3, 8);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> x(32);
        for (double& v : x) v = rng.lognormal(1.0) * rng.normal();
        const pq::QuantizedVector once = pq::quantize_dequantize(x, cfg);
        const pq::QuantizedVector twice = pq::quantize_dequantize(once.values, cfg);
        REQUIRE(twice.codes == once.codes);
        REQUIRE(twice.scales == once.scales);
        REQUIRE(twice.values == once.values);
    }
}

TEST_CASE("per-element error stays within half a step") {
    pq::Rng rng(12);
    const pq::QuantConfig cfg = make_cfg(4, 8);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> x(24);
        for (double& v : x) v = rng.normal() * 3.0;
        const pq::QuantizedVector q = pq::quantize_dequantize(x, cfg);
        const pq::Grouping grouping(x.size(), cfg.group_size);
        for (std::size_t k = 0; k < grouping.num_groups(); ++k) {
            const double half_step = q.scales[k] * 0.5;
            for (std::size_t i = grouping.begin(k); i < grouping.end(k); ++i) {
                CHECK(std::fabs(x[i] - q.values[i]) <= half_step * (1.0 + 1e-12));
            }
        }
    }
}

TEST_CASE("negating the input negates codes and values bitwise") {
    pq::Rng rng(13);
    const pq::QuantConfig cfg = make_cfg(3, 8);
    std::vector<double> x(16);
    for (double& v : x) v = rng.normal();
    std::vector<double> neg(16);
    for (std::size_t i = 0; i < x.size(); ++i) neg[i] = -x[i];

    const pq::QuantizedVector qx = pq::quantize_dequantize(x, cfg);
    const pq::QuantizedVector qn = pq::quantize_dequantize(neg, cfg);
    CHECK(qx.scales == qn.scales);
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(qn.codes[i] == -qx.codes[i]);
        CHECK(qn.values[i] == -qx.values[i]);
    }
}

TEST_CASE("an all-zero group keeps scale and codes at zero") {
    const std::vector<double> x = {0.0, 0.0, 0.0, 0.0, 1.0, -2.0, 0.5, 2.0};
    const pq::QuantizedVector q = pq::quantize_dequantize(x, make_cfg(3, 4));
    CHECK(q.scales[0] == 0.0);
    CHECK(q.scales[1] == 2.0 / 3.0);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(q.codes[i] == 0);
        CHECK(q.values[i] == 0.0);
    }
}

TEST_CASE("codes never leave the representable range") {
    pq::Rng rng(14);
    for (int bits : {2, 3, 4, 8}) {
        const pq::QuantConfig cfg = make_cfg(bits, 8);
        for (int t = 0; t < 50; ++t) {
            std::vector<double> x(32);
            for (double& v : x) v = rng.lognormal(2.0) * rng.normal();
            const pq::QuantizedVector q = pq::quantize_dequantize(x, cfg);
            for (std::int8_t c : q.codes) {
                CHECK(c >= -cfg.qmax());
                CHECK(c <= cfg.qmax());
            }
        }
    }
}

TEST_CASE("measured error respects the worst-case bound") {
    pq::Rng rng(15);
    const pq::QuantConfig cfg = make_cfg(3, 8);
    const pq::Grouping grouping(32, 8);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> x(32);
        for (double& v : x) v = rng.lognormal(1.5) * rng.normal();
        const pq::QuantizedVector q = pq::quantize_dequantize(x, cfg);
        CHECK(pq::quant_error(x, q.values) <=
              pq::error_upper_bound(x, grouping, cfg.qmax()));
    }
}

TEST_CASE("matrix quantizers agree with the vector quantizer") {
    const std::vector<double> x = {0.5, -2.0, 1.0, 3.0};
    const pq::QuantizedVector q = pq::quantize_dequantize(x, make_cfg(3, 4));

    const pq::Matrix row(1, 4, x);
    const pq::Matrix qrow = pq::quantize_rows(row, make_cfg(3, 4));
    for (std::size_t j = 0; j < 4; ++j) CHECK(qrow(0, j) == q.values[j]);

    const pq::Matrix col(4, 1, x);
    const pq::Matrix qcol = pq::quantize_cols(col, make_cfg(3, 4));
    for (std::size_t i = 0; i < 4; ++i) CHECK(qcol(i, 0) == q.values[i]);
}

TEST_CASE("column grouping runs down the input dimension") {
    // two columns, groups of two rows; each column group scales separately:
    // col 0 groups {3, 1.5} (s=1) and {0.3, 0.1} (s=0.1),
    // col 1 groups {30, 15} (s=10) and {0.9, 0.3} (s=0.3)
    const pq::Matrix w(4, 2, {3.0, 30.0, 1.5, 15.0, 0.3, 0.9, 0.1, 0.3});
    const pq::Matrix qw = pq::quantize_cols(w, make_cfg(3, 2));
    CHECK(qw(0, 0) == 3.0);
    CHECK(qw(1, 0) == 2.0);
    CHECK(qw(0, 1) == 30.0);
    CHECK(qw(1, 1) == 20.0);
    CHECK(qw(2, 0) == 0.3);
    CHECK(qw(3, 0) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(qw(2, 1) == 0.9);
    CHECK(qw(3, 1) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("config and argument validation") {
    CHECK_THROWS_AS(make_cfg(1, 4).validate(), std::invalid_argument);
    CHECK_THROWS_AS(make_cfg(9, 4).validate(), std::invalid_argument);
    CHECK_THROWS_AS(make_cfg(3, 0).validate(), std::invalid_argument);
    CHECK_NOTHROW(make_cfg(2, 1).validate());

    const std::vector<double> x = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(pq::quantize_dequantize(x, make_cfg(3, 2)), std::invalid_argument);
    CHECK_THROWS_AS(pq::group_scale({}, 3), std::invalid_argument);
    CHECK_THROWS_AS(pq::group_scale(x, 0), std::invalid_argument);
    CHECK(pq::group_scale(x, 3) == 1.0);
}
