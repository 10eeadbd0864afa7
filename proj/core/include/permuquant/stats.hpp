#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "permuquant/grouping.hpp"
#include "permuquant/matrix.hpp"

namespace permuquant {

// Per-channel second moments mu2[c] = mean over rows of x(r, c)^2.
struct ChannelStats {
    std::vector<double> mu2;
    std::size_t samples = 0;
};

// Columns are channels, rows are samples. Throws on an empty sample set.
ChannelStats channel_second_moments(const Matrix& x);

// Per-row second moments: mean over the row's entries of w(r, c)^2.
// Rows of a weight matrix are input channels. Throws on zero columns.
std::vector<double> row_second_moments(const Matrix& w);

// Per-group ratio of the mean extremal term to its assumed ceiling:
//   rho(G_k) = mean_r max_{i in G_k} x(r,i)^2 / (log2(2g) * max_{i in G_k} mu2[i]).
// A group whose channels are all zero has no ceiling; it reports rho 0
// with the degenerate flag set instead of dividing by zero.
struct ExtremalDiagnostics {
    std::vector<double> rho;          // one per group
    std::vector<std::uint8_t> degenerate;
    double c_hat = 0.0;               // max rho over non-degenerate groups
};

ExtremalDiagnostics group_rho(const Matrix& x, const Grouping& grouping);

// Proxy objective sum_k max_{i in G_k} mu2[i]; mu2 is given in the order
// the grouping chunks it.
double proxy_objective(std::span<const double> mu2, const Grouping& grouping);

// Uniform-rounding-noise model of the expected squared error:
//   g/(12 qmax^2) * sum_k mean_r max_{i in G_k} x(r,i)^2.
double expected_error_uniform_noise(const Matrix& x, const Grouping& grouping, int qmax);

}  // namespace permuquant
