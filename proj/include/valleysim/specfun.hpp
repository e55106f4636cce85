#pragma once

#include <string>

namespace valleysim::specfun {

// Modified Bessel functions of real order on (0, 700]. Orders outside
// (-1, 1) are not supported through the public entry points; internal
// recurrences raise the order by one where derivatives need it.
double bessel_iv(double nu, double x);
double bessel_kv(double nu, double x);
// log K_nu(x); valid far beyond the overflow point of bessel_kv itself.
double log_bessel_kv(double nu, double x);
double bessel_iv_prime(double nu, double x);
double bessel_kv_prime(double nu, double x);

// Regularized incomplete beta I_x(a, b) and lower gamma P(a, x).
double inc_beta_reg(double a, double b, double x);
double inc_gamma_lower_reg(double a, double x);

double gamma_cdf(double shape, double x);       // Gamma(shape, 1)
double exponential_cdf(double mean, double x);

// Laplace transform of the exponential first-passage functionals of a
// 3-d drifted Bessel path: E[exp(-gamma * F^{sign}(y))].
double laplace_F(double gamma, double y, double kappa, int sign);
// Large-y limit of the F^- transform.
double laplace_F_limit(double gamma, double kappa);
// E[exp(-gamma * G^+(y/2, y))] for the killed drifted Brownian functional.
double laplace_G_plus(double gamma, double y, double kappa);
// E[F^+(y) / e^y], bounded in y.
double mean_F_plus_scaled(double y, double kappa);

struct Upsilon0Result {
    double value = 0.0;
    double error_estimate = 0.0;
};

// The negative constant entering C_kappa, by adaptive quadrature.
Upsilon0Result upsilon0(double kappa);
double c0_constant(double kappa);
double c_kappa(double kappa);

struct KappaParams {
    double kappa = 0.0;
    double c0 = 0.0;
    double upsilon0 = 0.0;
    double upsilon0_error = 0.0;
    double c_kappa = 0.0;

    static KappaParams compute(double kappa);
};

// Generalized-arcsine aging limit, alpha >= 1.
double aging_probability(double alpha, double kappa);
// Independent quadrature route for the same integral (used as an oracle).
double aging_probability_quadrature(double alpha, double kappa);

// Renewal limit laws for the hitting times of the last/next visited valley.
double renewal_joint_density(double x, double y, double kappa);
double renewal_last_cdf(double x, double kappa);
double renewal_next_tail(double v, double kappa);
double renewal_duration_density(double x, double kappa);
double renewal_duration_cdf(double x, double kappa);

// Laplace transform of the Mittag-Leffler limit of the rescaled number of
// visited valleys, as a power series in -u/C.
double mittag_leffler_lt(double u, double kappa, double c_kappa);
double mittag_leffler_mean(double kappa, double c_kappa);

enum class WidthKind { interminima, tau_height };

// Laplace transforms of valley widths: spacing between an h-maximum and
// the next h-minimum, and of the first ascent of height h after a minimum.
double valley_width_lt(double alpha, double h, double kappa, WidthKind which);

// P[drifted BM from y hits z before x], scale density e^{zeta * u}.
double hitting_probability(double x, double y, double z, double zeta);

// Mean excess heights above h of the potential at consecutive h-extrema.
double excess_mean_climb(double kappa, double h);   // V(M_i) - V(m_i) - h
double excess_mean_descent(double kappa, double h); // V(M_i) - V(m_{i+1}) - h

// BES(3, kappa/2) hit-ordering probability: starting from alpha*h, the
// chance of reaching gamma*h before omega*h (gamma < alpha < omega).
double bes3_hit_low_first(double kappa, double h, double gamma, double alpha, double omega);

} // namespace valleysim::specfun
