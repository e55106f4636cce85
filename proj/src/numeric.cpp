#include "valleysim/numeric.hpp"

#include <array>
#include <cmath>

namespace valleysim {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace {

// 15-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr std::array<double, 8> kGLNode = {
    0.0,
    0.2011940939974345223006283,
    0.3941513470775633698972074,
    0.5709721726085388475372267,
    0.7244177313601700474161861,
    0.8482065834104272162006483,
    0.9372733924007059043077589,
    0.9879925180204854284895657,
};
constexpr std::array<double, 8> kGLWeight = {
    0.2025782419255612728806202,
    0.1984314853271115764561183,
    0.1861610000155622110268006,
    0.1662692058169939335532009,
    0.1395706779261543144478048,
    0.1071592204671719350118695,
    0.0703660474881081247092674,
    0.0307532419961172683546284,
};

double gl15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double s = kGLWeight[0] * f(c);
    for (int i = 1; i < 8; ++i) {
        const double dx = h * kGLNode[i];
        s += kGLWeight[i] * (f(c - dx) + f(c + dx));
    }
    return s * h;
}

void refine(const std::function<double(double)>& f, double a, double b, double whole,
            double abs_tol, int depth, QuadratureResult& out) {
    const double m = 0.5 * (a + b);
    const double left = gl15(f, a, m);
    const double right = gl15(f, m, b);
    const double diff = std::fabs(left + right - whole);
    if (diff <= abs_tol || depth <= 0) {
        out.value += left + right;
        out.error_estimate += diff;
        if (depth <= 0 && diff > abs_tol) out.converged = false;
        return;
    }
    refine(f, a, m, left, 0.5 * abs_tol, depth - 1, out);
    refine(f, m, b, right, 0.5 * abs_tol, depth - 1, out);
}

} // namespace

QuadratureResult adaptive_quadrature(const std::function<double(double)>& f, double a, double b,
                                     double abs_tol, int max_depth) {
    QuadratureResult out;
    if (a == b) return out;
    refine(f, a, b, gl15(f, a, b), abs_tol, max_depth, out);
    return out;
}

} // namespace valleysim
