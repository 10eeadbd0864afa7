#include "permuquant/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace permuquant {

namespace {

// mean over rows of max_{i in G_k} x(r,i)^2, for every group.
std::vector<double> group_mean_extremal_sq(const Matrix& x, const Grouping& grouping) {
    std::vector<double> out(grouping.num_groups(), 0.0);
    for (std::size_t k = 0; k < grouping.num_groups(); ++k) {
        double acc = 0.0;
        for (std::size_t r = 0; r < x.rows(); ++r) {
            double max_sq = 0.0;
            for (std::size_t i = grouping.begin(k); i < grouping.end(k); ++i) {
                max_sq = std::max(max_sq, x(r, i) * x(r, i));
            }
            acc += max_sq;
        }
        out[k] = acc / static_cast<double>(x.rows());
    }
    return out;
}

}  // namespace

ChannelStats channel_second_moments(const Matrix& x) {
    if (x.rows() == 0) throw std::invalid_argument("stats: empty sample set");
    ChannelStats st;
    st.samples = x.rows();
    st.mu2.assign(x.cols(), 0.0);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        for (std::size_t c = 0; c < x.cols(); ++c) {
            st.mu2[c] += x(r, c) * x(r, c);
        }
    }
    for (double& v : st.mu2) v /= static_cast<double>(st.samples);
    return st;
}

std::vector<double> row_second_moments(const Matrix& w) {
    if (w.cols() == 0) throw std::invalid_argument("stats: empty rows");
    std::vector<double> mu2(w.rows(), 0.0);
    for (std::size_t r = 0; r < w.rows(); ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < w.cols(); ++c) acc += w(r, c) * w(r, c);
        mu2[r] = acc / static_cast<double>(w.cols());
    }
    return mu2;
}

ExtremalDiagnostics group_rho(const Matrix& x, const Grouping& grouping) {
    if (x.cols() != grouping.d()) {
        throw std::invalid_argument("group_rho: columns do not match grouping");
    }
    const std::vector<double> mu2 = channel_second_moments(x).mu2;
    const std::vector<double> extremal = group_mean_extremal_sq(x, grouping);
    const double log_term = std::log2(2.0 * static_cast<double>(grouping.g()));

    ExtremalDiagnostics diag;
    diag.rho.assign(grouping.num_groups(), 0.0);
    diag.degenerate.assign(grouping.num_groups(), 0);
    for (std::size_t k = 0; k < grouping.num_groups(); ++k) {
        double max_mu2 = 0.0;
        for (std::size_t i = grouping.begin(k); i < grouping.end(k); ++i) {
            max_mu2 = std::max(max_mu2, mu2[i]);
        }
        const double denom = log_term * max_mu2;
        if (denom == 0.0) {
            diag.degenerate[k] = 1;  // all-zero group, rho pinned to 0
            continue;
        }
        diag.rho[k] = extremal[k] / denom;
        diag.c_hat = std::max(diag.c_hat, diag.rho[k]);
    }
    return diag;
}

double proxy_objective(std::span<const double> mu2, const Grouping& grouping) {
    if (mu2.size() != grouping.d()) {
        throw std::invalid_argument("proxy_objective: length does not match grouping");
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < grouping.num_groups(); ++k) {
        double max_mu2 = 0.0;
        for (std::size_t i = grouping.begin(k); i < grouping.end(k); ++i) {
            max_mu2 = std::max(max_mu2, mu2[i]);
        }
        sum += max_mu2;
    }
    return sum;
}

double expected_error_uniform_noise(const Matrix& x, const Grouping& grouping, int qmax) {
    if (x.cols() != grouping.d()) {
        throw std::invalid_argument("expected_error_uniform_noise: columns do not match grouping");
    }
    if (x.rows() == 0) throw std::invalid_argument("stats: empty sample set");
    if (qmax < 1) throw std::invalid_argument("expected_error_uniform_noise: qmax must be >= 1");
    const std::vector<double> extremal = group_mean_extremal_sq(x, grouping);
    double sum = 0.0;
    for (double v : extremal) sum += v;
    const double q2 = static_cast<double>(qmax) * static_cast<double>(qmax);
    return static_cast<double>(grouping.g()) / (12.0 * q2) * sum;
}

}  // namespace permuquant
