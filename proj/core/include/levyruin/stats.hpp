#pragma once
#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "levyruin/errors.hpp"

namespace levyruin {

// sup |F_a - F_b| between two empirical CDFs (right-continuous convention).
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// sup distance between an empirical CDF and an analytic CDF.
double ks_vs_cdf(std::vector<double> a, const std::function<double(double)>& cdf);

// 1-Wasserstein distance between empirical laws: int |F_a - F_b|.
double wasserstein1(std::vector<double> a, std::vector<double> b);

// Squared distance correlation (biased V-statistic form). O(n^2); callers
// subsample.
double distance_correlation_sq(const std::vector<double>& x, const std::vector<double>& y);

inline double ks_standard_error(std::size_t n) {
    return 0.5 / std::sqrt(static_cast<double>(n));
}

} // namespace levyruin
