#pragma once

#include <string>
#include <vector>

namespace avgcase {

// A theoretical asymptotic rate Theta(t^exponent) or
// Theta(t^exponent log t) when log_factor is set. regime names the active
// case branch; a trailing "~" marks a branch decision that fell back to
// tolerance comparison (inputs not representable as small rationals).
// constant_known is always false: the theory fixes exponents, not constants.
struct RateSpec {
    double exponent = 0.0;
    bool log_factor = false;
    std::string regime;
    bool constant_known = false;
};

// Optimal tuning result: the rate plus the optimal second parameter
// beta_star; the optimal first parameter equals the distribution's tau.
struct OptimalRate {
    RateSpec rate;
    double beta_star = 0.0;
};

// Least-squares slope of log(value) vs log(t) over a trailing window.
// std_error is the standard error of the log t coefficient ("stderr" is a
// cstdio macro). shrunk marks a window reduced to the trailing half
// because the trajectory was shorter than the requested window.
struct SlopeFit {
    double slope = 0.0;
    double std_error = 0.0;
    int window_first = 0;
    int window_last = 0;
    bool log_corrected = false;
    bool shrunk = false;
};

// Average-case exponent of the shifted-Jacobi momentum method with
// parameters (alpha, beta) on the Beta(tau, xi) spectral family, for the
// function gap (objective_l = 1) or squared gradient norm (objective_l = 2).
RateSpec gcm_avg_exponent(double alpha, double beta, double tau, double xi,
                          int objective_l);

// Best achievable average-case exponent over all (alpha, beta) tunings:
// -2(xi+2) at beta* = xi+2 for the gap, -2(xi+3) at beta* = xi+3 for the
// gradient norm.
OptimalRate optimal_exponent(double xi, int objective_l);

// Worst-case (sup over the support) exponent of the same method.
RateSpec gcm_worst_exponent(double alpha, double beta, int objective_l);

// Average-case exponents of the fixed-schedule baselines.
RateSpec nesterov_avg_exponent(double xi, int objective_l);
RateSpec gd_avg_exponent(double xi, int objective_l);

// Average-case gap exponent of the suitably tuned Laguerre method on the
// Gamma(alpha) spectral family: -(alpha+2).
RateSpec laguerre_exponent(double alpha);

// Gamma(l+xi+1) Gamma(2t+tau+1) / Gamma(2t+l+xi+tau+2), the gradient
// descent moment integral for Beta weights at L = 1, via log-Gamma.
double gd_beta_closed_form(int t, double tau, double xi, int objective_l);

// 1 / C(t+alpha+2, t), the distance metric of the tuned Laguerre method,
// via log-Gamma for real alpha.
double laguerre_closed_form(int t, double alpha);

// OLS fit of log(values[t]) against log t (plus a free log log t regressor
// when include_log) over the trailing window_len entries; shorter inputs
// shrink the window to the trailing half. Nonpositive or non-finite values
// inside the window are an error.
SlopeFit fit_slope(const std::vector<double>& values, int window_len = 700,
                   bool include_log = false);

} // namespace avgcase
