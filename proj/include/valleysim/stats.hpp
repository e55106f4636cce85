#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace valleysim {

struct SampleSummary {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0; // unbiased
    double standard_error = 0.0;
};

SampleSummary summarize(const std::vector<double>& values);

// Two-sided Kolmogorov-Smirnov distance of a sample against a CDF.
double ks_statistic(std::vector<double> values, const std::function<double(double)>& cdf);
// Asymptotic p-value with the usual small-sample effective-n correction.
double ks_p_value(double d, std::size_t n);

double two_sample_ks_statistic(std::vector<double> a, std::vector<double> b);
// Critical distance at the given level for a two-sample test.
double two_sample_ks_critical(double level, std::size_t n, std::size_t m);

// Kolmogorov distribution tail Q(lambda) = 2 sum (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_tail(double lambda);

} // namespace valleysim
