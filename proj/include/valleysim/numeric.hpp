#pragma once

#include <cmath>
#include <cstddef>
#include <functional>

namespace valleysim {

// Exact integral of exp(v) over a segment where v is linear, going from v0
// to v1 over length len:  len * (e^{v1} - e^{v0}) / (v1 - v0).
// Written as e^{(v0+v1)/2} * len * sinh(d/2)/(d/2) so the v1 == v0 limit is
// handled without a branch on exact equality.
inline double exp_segment_integral(double v0, double v1, double len) {
    const double h = 0.5 * (v1 - v0);
    double ratio; // sinh(h)/h
    if (std::fabs(h) < 1e-5) {
        ratio = 1.0 + h * h / 6.0;
    } else {
        ratio = std::sinh(h) / h;
    }
    return len * std::exp(0.5 * (v0 + v1)) * ratio;
}

// Neumaier variant of Kahan summation; keeps long scale-integral sums
// accurate to ~1e-15 relative regardless of cell count.
class NeumaierSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

double normal_cdf(double x);

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = true;
};

// Adaptive bisection with a 15-point Gauss-Legendre rule per panel.
QuadratureResult adaptive_quadrature(const std::function<double(double)>& f, double a, double b,
                                     double abs_tol, int max_depth = 48);

} // namespace valleysim
