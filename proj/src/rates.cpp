#include "avgcase/rates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <Eigen/Dense>

#include "avgcase/errors.hpp"

namespace avgcase {

namespace {

constexpr double kSnapTol = 1e-12;
constexpr long long kMaxDen = 4096;

struct Rational {
    long long num = 0;
    long long den = 1;
    bool ok = false;
};

// Continued-fraction convergents with denominator capped at kMaxDen.
// Succeeds when a convergent lands within kSnapTol of x, which absorbs
// the float noise of sums like tau + 1/2 for any small-denominator input.
Rational snap_rational(double x) {
    if (!std::isfinite(x) || std::fabs(x) > 1e6) return {};
    long long p_prev = 1, p_prev2 = 0;
    long long q_prev = 0, q_prev2 = 1;
    double rem = x;
    for (int i = 0; i < 64; ++i) {
        double fl = std::floor(rem);
        long long a = static_cast<long long>(fl);
        long long p = a * p_prev + p_prev2;
        long long q = a * q_prev + q_prev2;
        if (q > kMaxDen || q <= 0) break;
        if (std::fabs(x - static_cast<double>(p) / static_cast<double>(q)) <=
            kSnapTol) {
            return {p, q, true};
        }
        p_prev2 = p_prev;
        p_prev = p;
        q_prev2 = q_prev;
        q_prev = q;
        double frac = rem - fl;
        if (frac <= 0.0) break;
        rem = 1.0 / frac;
        if (!std::isfinite(rem)) break;
    }
    return {};
}

// Three-way compare. Exact on snapped rationals; otherwise falls back to a
// kSnapTol band and records that the decision used the tolerance path.
int compare3(double a, double b, bool* tolerance_used) {
    Rational ra = snap_rational(a);
    Rational rb = snap_rational(b);
    if (ra.ok && rb.ok) {
        long long lhs = ra.num * rb.den;
        long long rhs = rb.num * ra.den;
        if (lhs == rhs) return 0;
        return lhs < rhs ? -1 : 1;
    }
    *tolerance_used = true;
    if (std::fabs(a - b) <= kSnapTol) return 0;
    return a < b ? -1 : 1;
}

void check_order(int objective_l, const char* where) {
    if (objective_l != 1 && objective_l != 2) {
        throw ArgumentError(std::string(where) +
                            ": objective_l must be 1 (gap) or 2 (gradient)");
    }
}

void check_gt_minus_one(double v, const char* name, const char* where) {
    if (!(v > -1.0) || !std::isfinite(v)) {
        throw ArgumentError(std::string(where) + ": " + name +
                            " must be finite and > -1");
    }
}

RateSpec finish(double exponent, bool log_factor, std::string regime,
                bool tolerance_used) {
    if (tolerance_used) regime += "~";
    RateSpec r;
    r.exponent = exponent;
    r.log_factor = log_factor;
    r.regime = std::move(regime);
    return r;
}

} // namespace

RateSpec gcm_avg_exponent(double alpha, double beta, double tau, double xi,
                          int objective_l) {
    check_order(objective_l, "gcm_avg_exponent");
    check_gt_minus_one(alpha, "alpha", "gcm_avg_exponent");
    check_gt_minus_one(beta, "beta", "gcm_avg_exponent");
    check_gt_minus_one(tau, "tau", "gcm_avg_exponent");
    check_gt_minus_one(xi, "xi", "gcm_avg_exponent");
    const double l = objective_l;
    bool tol = false;
    const int cmp_a = compare3(alpha, tau + 0.5, &tol);
    const int cmp_b = compare3(beta, xi + l + 0.5, &tol);
    if (cmp_a < 0 && cmp_b < 0) {
        return finish(-1.0 - 2.0 * beta, false, "sub-critical", tol);
    }
    if (cmp_a == 0 && cmp_b == 0) {
        return finish(-2.0 * (xi + l + 1.0), true, "critical", tol);
    }
    const double inner = std::max(alpha - beta - tau, -xi - l);
    return finish(2.0 * (inner - 1.0), false, "post-critical", tol);
}

OptimalRate optimal_exponent(double xi, int objective_l) {
    check_order(objective_l, "optimal_exponent");
    check_gt_minus_one(xi, "xi", "optimal_exponent");
    const double l = objective_l;
    OptimalRate opt;
    opt.rate = finish(-2.0 * (xi + l + 1.0), false, "optimal", false);
    opt.beta_star = xi + l + 1.0;
    return opt;
}

RateSpec gcm_worst_exponent(double alpha, double beta, int objective_l) {
    check_order(objective_l, "gcm_worst_exponent");
    check_gt_minus_one(alpha, "alpha", "gcm_worst_exponent");
    check_gt_minus_one(beta, "beta", "gcm_worst_exponent");
    const double l = objective_l;
    bool tol = false;
    if (compare3(alpha, beta - l, &tol) > 0) {
        return finish(2.0 * (alpha - beta), false, "right-edge", tol);
    }
    if (compare3(beta, l - 0.5, &tol) <= 0) {
        return finish(-1.0 - 2.0 * beta, false, "left-edge", tol);
    }
    return finish(-2.0 * l, false, "plateau", tol);
}

RateSpec nesterov_avg_exponent(double xi, int objective_l) {
    check_order(objective_l, "nesterov_avg_exponent");
    check_gt_minus_one(xi, "xi", "nesterov_avg_exponent");
    if (objective_l == 2) {
        return finish(-(xi + 4.5), false, "tail-limited", false);
    }
    bool tol = false;
    const int cmp = compare3(xi, -0.5, &tol);
    if (cmp < 0) return finish(-2.0 * (xi + 2.0), false, "accelerated", tol);
    if (cmp == 0) return finish(-3.0, true, "critical", tol);
    return finish(-(xi + 3.5), false, "tail-limited", tol);
}

RateSpec gd_avg_exponent(double xi, int objective_l) {
    check_order(objective_l, "gd_avg_exponent");
    check_gt_minus_one(xi, "xi", "gd_avg_exponent");
    return finish(-(xi + objective_l + 1.0), false, "single", false);
}

RateSpec laguerre_exponent(double alpha) {
    check_gt_minus_one(alpha, "alpha", "laguerre_exponent");
    return finish(-(alpha + 2.0), false, "tuned", false);
}

double gd_beta_closed_form(int t, double tau, double xi, int objective_l) {
    if (t < 0) throw ArgumentError("gd_beta_closed_form: t must be >= 0");
    if (objective_l < 0 || objective_l > 2) {
        throw ArgumentError("gd_beta_closed_form: objective_l must be 0, 1, or 2");
    }
    check_gt_minus_one(tau, "tau", "gd_beta_closed_form");
    check_gt_minus_one(xi, "xi", "gd_beta_closed_form");
    const double l = objective_l;
    return std::exp(std::lgamma(l + xi + 1.0) + std::lgamma(2.0 * t + tau + 1.0) -
                    std::lgamma(2.0 * t + l + xi + tau + 2.0));
}

double laguerre_closed_form(int t, double alpha) {
    if (t < 0) throw ArgumentError("laguerre_closed_form: t must be >= 0");
    check_gt_minus_one(alpha, "alpha", "laguerre_closed_form");
    return std::exp(std::lgamma(t + 1.0) + std::lgamma(alpha + 3.0) -
                    std::lgamma(t + alpha + 3.0));
}

SlopeFit fit_slope(const std::vector<double>& values, int window_len,
                   bool include_log) {
    if (window_len < 2) {
        throw ArgumentError("fit_slope: window_len must be at least 2");
    }
    const int n = static_cast<int>(values.size());
    const int last = n - 1;
    SlopeFit fit;
    int first;
    if (n >= window_len) {
        first = std::max(1, last - window_len + 1);
    } else {
        first = std::max(1, last - n / 2 + 1);
        fit.shrunk = true;
    }
    // log log t is the extra regressor; it needs t >= 2.
    if (include_log && first < 2) first = 2;
    const int m = last - first + 1;
    const int k = include_log ? 3 : 2;
    if (m < k + 1) {
        throw ArgumentError("fit_slope: too few values for a slope fit");
    }
    for (int t = first; t <= last; ++t) {
        if (!(values[t] > 0.0) || !std::isfinite(values[t])) {
            char buf[96];
            std::snprintf(buf, sizeof(buf),
                          "fit_slope: nonpositive or non-finite value at t=%d",
                          t);
            throw ArgumentError(buf);
        }
    }
    Eigen::MatrixXd design(m, k);
    Eigen::VectorXd response(m);
    for (int i = 0; i < m; ++i) {
        const double t = first + i;
        design(i, 0) = 1.0;
        design(i, 1) = std::log(t);
        if (include_log) design(i, 2) = std::log(std::log(t));
        response(i) = std::log(values[first + i]);
    }
    const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(response);
    const double rss = (response - design * coef).squaredNorm();
    const double s2 = rss / static_cast<double>(m - k);
    const Eigen::MatrixXd cov =
        (design.transpose() * design)
            .ldlt()
            .solve(Eigen::MatrixXd::Identity(k, k));
    fit.slope = coef(1);
    fit.std_error = std::sqrt(std::max(0.0, s2 * cov(1, 1)));
    fit.window_first = first;
    fit.window_last = last;
    fit.log_corrected = include_log;
    return fit;
}

} // namespace avgcase
