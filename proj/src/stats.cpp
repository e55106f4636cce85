#include "valleysim/stats.hpp"

#include <algorithm>
#include <cmath>

#include "valleysim/errors.hpp"

namespace valleysim {

SampleSummary summarize(const std::vector<double>& values) {
    SampleSummary s;
    s.n = values.size();
    if (s.n == 0) return s;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(s.n);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    s.mean = mean;
    s.variance = s.n > 1 ? ss / static_cast<double>(s.n - 1) : 0.0;
    s.standard_error = s.n > 0 ? std::sqrt(s.variance / static_cast<double>(s.n)) : 0.0;
    return s;
}

double ks_statistic(std::vector<double> values, const std::function<double(double)>& cdf) {
    if (values.empty()) throw Error(ErrorCode::insufficient_data, "KS needs samples");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double f = cdf(values[i]);
        d = std::max(d, std::max((static_cast<double>(i) + 1.0) / n - f,
                                 f - static_cast<double>(i) / n));
    }
    return d;
}

double kolmogorov_tail(double lambda) {
    if (lambda <= 0.0) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += sign * term;
        sign = -sign;
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_p_value(double d, std::size_t n) {
    const double sn = std::sqrt(static_cast<double>(n));
    return kolmogorov_tail((sn + 0.12 + 0.11 / sn) * d);
}

double two_sample_ks_statistic(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw Error(ErrorCode::insufficient_data, "KS needs samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double two_sample_ks_critical(double level, std::size_t n, std::size_t m) {
    const double c = std::sqrt(-0.5 * std::log(level / 2.0));
    return c * std::sqrt((static_cast<double>(n) + static_cast<double>(m)) /
                         (static_cast<double>(n) * static_cast<double>(m)));
}

} // namespace valleysim
