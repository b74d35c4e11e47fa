#include "avgcase/polynomials.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "avgcase/errors.hpp"
#include "avgcase/quadrature.hpp"
#include "tracked.hpp"

namespace avgcase {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();
// past this magnitude a node is treated as divergent (its square would
// approach double overflow)
constexpr double kBlowup = 1e140;

std::string format_method(const char* fmt, double a, double b, double c) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), fmt, a, b, c);
    return buf;
}

double metric_prefactor(int l) {
    if (l < 0 || l > 2) throw ArgumentError("metric index l must be 0, 1 or 2");
    return l == 1 ? 0.5 : 1.0;
}

MomentumCoeffs method_schedule(const Method& method, int T) {
    switch (method.kind) {
    case Method::Kind::gcm:
        return gcm_coeffs(T, method.alpha, method.beta, method.L);
    case Method::Kind::laguerre:
        return laguerre_coeffs(T, method.alpha);
    case Method::Kind::gd:
        return gd_coeffs(T, method.L);
    default:
        throw ArgumentError("method_schedule: no momentum schedule for this method");
    }
}

// P_t = (A_t + B_t lambda) P_{t-1} + (1 - A_t) P_{t-2} over a grid.
PolyTable evaluate_momentum(const MomentumCoeffs& mc, int T,
                            const std::vector<double>& lambda) {
    std::size_t n = lambda.size();
    PolyTable table(T + 1, std::vector<double>(n, 1.0));
    std::vector<double> old(n, 1.0);
    for (int t = 1; t <= T; ++t) {
        double a = mc.A[t], b = mc.B[t], c = 1.0 - a;
        const std::vector<double>& cur = table[t - 1];
        std::vector<double>& next = table[t];
        for (std::size_t i = 0; i < n; ++i)
            next[i] = (a + b * lambda[i]) * cur[i] + c * old[i];
        old = cur;
    }
    return table;
}

} // namespace

CoefficientTriple jacobi_raw_coefficients(int t, double a, double b) {
    if (t < 1) throw ArgumentError("jacobi_raw_coefficients requires t >= 1");
    double s = a + b;
    if (t == 1) return {0.5 * (a - b), 0.5 * (s + 2.0), 0.0};
    double den1 = 2.0 * t * (t + s);
    double den2 = den1 * (2.0 * t + s - 2.0);
    if (den1 == 0.0 || den2 == 0.0) {
        throw SingularCoefficientError(
            "jacobi recurrence denominator vanishes at degree " +
                std::to_string(t),
            t);
    }
    double two = 2.0 * t + s;
    return {(a * a - b * b) * (two - 1.0) / den2, (two - 1.0) * two / den1,
            -2.0 * (t + a - 1.0) * (t + b - 1.0) * two / den2};
}

RecurrenceCoefficients jacobi_raw_table(int T, double a, double b) {
    if (T < 1) throw ArgumentError("jacobi_raw_table requires T >= 1");
    RecurrenceCoefficients rc;
    rc.c0.assign(T + 1, 0.0);
    rc.c1.assign(T + 1, 0.0);
    rc.g.assign(T + 1, 0.0);
    for (int t = 1; t <= T; ++t) {
        CoefficientTriple c = jacobi_raw_coefficients(t, a, b);
        rc.c0[t] = c.c0;
        rc.c1[t] = c.c1;
        rc.g[t] = c.g;
    }
    return rc;
}

RecurrenceCoefficients shift_affine(const RecurrenceCoefficients& coeffs, double a,
                                    double b) {
    if (a == 0.0) throw ArgumentError("shift_affine requires a != 0");
    RecurrenceCoefficients out = coeffs;
    for (int t = 1; t <= coeffs.degree(); ++t) {
        out.c0[t] = coeffs.c0[t] + b * coeffs.c1[t];
        out.c1[t] = a * coeffs.c1[t];
    }
    return out;
}

RecurrenceCoefficients to_residual(const RecurrenceCoefficients& coeffs) {
    int T = coeffs.degree();
    RecurrenceCoefficients out;
    out.c0.assign(T + 1, 0.0);
    out.c1.assign(T + 1, 0.0);
    out.g.assign(T + 1, 0.0);
    double v_prev2 = 0.0, v_prev = 1.0; // p_{-1}(0), p_0(0)
    for (int t = 1; t <= T; ++t) {
        double v = coeffs.c0[t] * v_prev + coeffs.g[t] * v_prev2;
        if (v == 0.0) {
            throw DegeneracyError(
                "residual normalization vanishes at degree " + std::to_string(t),
                t);
        }
        out.c0[t] = coeffs.c0[t] * v_prev / v;
        out.c1[t] = coeffs.c1[t] * v_prev / v;
        out.g[t] = 1.0 - out.c0[t];
        v_prev2 = v_prev;
        v_prev = v;
    }
    return out;
}

Method Method::gcm(double alpha, double beta, double L) {
    if (!(alpha > -1.0) || !(beta > -1.0))
        throw ArgumentError("gcm requires alpha > -1 and beta > -1");
    if (!(L > 0.0)) throw ArgumentError("gcm requires L > 0");
    Method m;
    m.kind = Kind::gcm;
    m.alpha = alpha;
    m.beta = beta;
    m.L = L;
    return m;
}

Method Method::laguerre(double alpha) {
    if (!(alpha > -1.0)) throw ArgumentError("laguerre requires alpha > -1");
    Method m;
    m.kind = Kind::laguerre;
    m.alpha = alpha;
    return m;
}

Method Method::nesterov(double L) {
    if (!(L > 0.0)) throw ArgumentError("nesterov requires L > 0");
    Method m;
    m.kind = Kind::nesterov;
    m.L = L;
    return m;
}

Method Method::gd(double L) {
    if (!(L > 0.0)) throw ArgumentError("gd requires L > 0");
    Method m;
    m.kind = Kind::gd;
    m.L = L;
    return m;
}

std::string Method::describe() const {
    switch (kind) {
    case Kind::gcm:
        return format_method("gcm(alpha=%g, beta=%g, L=%g)", alpha, beta, L);
    case Kind::laguerre:
        return format_method("laguerre(alpha=%g)", alpha, 0.0, 0.0);
    case Kind::nesterov:
        return format_method("nesterov(L=%g)", L, 0.0, 0.0);
    case Kind::gd:
        return format_method("gd(L=%g)", L, 0.0, 0.0);
    }
    return "invalid";
}

MomentumCoeffs gcm_coeffs(int T, double alpha, double beta, double L) {
    if (T < 1) throw ArgumentError("gcm_coeffs requires T >= 1");
    if (!(alpha > -1.0) || !(beta > -1.0) || !(L > 0.0))
        throw ArgumentError("gcm_coeffs requires alpha, beta > -1 and L > 0");
    RecurrenceCoefficients shifted =
        shift_affine(jacobi_raw_table(T, alpha, beta), 2.0 / L, -1.0);
    RecurrenceCoefficients residual = to_residual(shifted);
    MomentumCoeffs mc;
    mc.A.assign(T + 1, 0.0);
    mc.B.assign(T + 1, 0.0);
    // independent route to the same schedule through the reciprocal ratio
    // delta_t = p_{t-1}(0)/p_t(0) = 1/(c0_t + g_t delta_{t-1}); disagreement
    // means the coefficient evaluation lost precision
    double delta = 0.0;
    for (int t = 1; t <= T; ++t) {
        mc.A[t] = residual.c0[t];
        mc.B[t] = residual.c1[t];
        delta = 1.0 / (shifted.c0[t] + shifted.g[t] * delta);
        double a = shifted.c0[t] * delta, b = shifted.c1[t] * delta;
        if (std::abs(a - mc.A[t]) > 1e-10 * std::max(1.0, std::abs(mc.A[t])) ||
            std::abs(b - mc.B[t]) > 1e-10 * std::max(1.0, std::abs(mc.B[t])))
            throw PrecisionError("gcm_coeffs: coefficient cross-check failed at t=" +
                                 std::to_string(t));
    }
    return mc;
}

MomentumCoeffs laguerre_coeffs(int T, double alpha) {
    if (T < 1) throw ArgumentError("laguerre_coeffs requires T >= 1");
    if (!(alpha > -1.0)) throw ArgumentError("laguerre_coeffs requires alpha > -1");
    MomentumCoeffs mc;
    mc.A.assign(T + 1, 0.0);
    mc.B.assign(T + 1, 0.0);
    for (int t = 1; t <= T; ++t) {
        mc.A[t] = (2.0 * t + alpha - 1.0) / (t + alpha);
        mc.B[t] = -1.0 / (t + alpha);
    }
    return mc;
}

MomentumCoeffs gd_coeffs(int T, double L) {
    if (T < 1) throw ArgumentError("gd_coeffs requires T >= 1");
    if (!(L > 0.0)) throw ArgumentError("gd_coeffs requires L > 0");
    MomentumCoeffs mc;
    mc.A.assign(T + 1, 1.0);
    mc.B.assign(T + 1, -1.0 / L);
    mc.A[0] = mc.B[0] = 0.0;
    return mc;
}

PolyTable gcm_polynomials(double alpha, double beta, double L, int T,
                          const std::vector<double>& lambda) {
    return evaluate_momentum(gcm_coeffs(std::max(1, T), alpha, beta, L), T, lambda);
}

PolyTable laguerre_polynomials(double alpha, int T,
                               const std::vector<double>& lambda) {
    return evaluate_momentum(laguerre_coeffs(std::max(1, T), alpha), T, lambda);
}

PolyTable nesterov_polynomials(double L, int T, const std::vector<double>& lambda) {
    if (T < 0) throw ArgumentError("nesterov_polynomials requires T >= 0");
    if (!(L > 0.0)) throw ArgumentError("nesterov_polynomials requires L > 0");
    std::size_t n = lambda.size();
    PolyTable table(T + 1, std::vector<double>(n, 1.0));
    std::vector<double> q(n, 1.0);
    for (int t = 0; t < T; ++t) {
        const std::vector<double>& p = table[t];
        std::vector<double>& next = table[t + 1];
        double m = static_cast<double>(t) / (t + 3.0);
        for (std::size_t i = 0; i < n; ++i) {
            double pn = (1.0 - lambda[i] / L) * q[i];
            next[i] = pn;
            q[i] = pn + m * (pn - p[i]);
        }
    }
    return table;
}

PolyTable gd_polynomial(double L, int T, const std::vector<double>& lambda) {
    if (T < 0) throw ArgumentError("gd_polynomial requires T >= 0");
    if (!(L > 0.0)) throw ArgumentError("gd_polynomial requires L > 0");
    std::size_t n = lambda.size();
    PolyTable table(T + 1, std::vector<double>(n, 1.0));
    for (int t = 1; t <= T; ++t)
        for (std::size_t i = 0; i < n; ++i)
            table[t][i] = table[t - 1][i] * (1.0 - lambda[i] / L);
    return table;
}

PolyTable residual_values(const Method& method, int T,
                          const std::vector<double>& lambda) {
    switch (method.kind) {
    case Method::Kind::gcm:
        return gcm_polynomials(method.alpha, method.beta, method.L, T, lambda);
    case Method::Kind::laguerre:
        return laguerre_polynomials(method.alpha, T, lambda);
    case Method::Kind::nesterov:
        return nesterov_polynomials(method.L, T, lambda);
    case Method::Kind::gd:
        return gd_polynomial(method.L, T, lambda);
    }
    throw ArgumentError("residual_values: invalid method kind");
}

namespace {

// One quadrature evaluation of the expected metric at a fixed node count.
// Bounded supports run in plain doubles with a per-node divergence freeze;
// the Gamma path runs the recurrences on e^{-lambda/2}-scaled values in
// mantissa/exponent form (nodes reach ~4n where neither P_t nor the scaled
// value is representable).
std::vector<double> metric_once(const SpectralDistribution& dist,
                                const Method& method, int l, int T, int n_nodes) {
    QuadratureRule rule = quadrature_nodes(dist, n_nodes);
    std::size_t n = rule.size();
    double cl = metric_prefactor(l);
    std::vector<double> wl(n); // weight times lambda^l (scaled weight on Gamma)
    for (std::size_t i = 0; i < n; ++i)
        wl[i] = rule.weight[i] * std::pow(rule.lambda[i], l);
    std::vector<double> out(T + 1, 0.0);

    bool momentum = method.kind != Method::Kind::nesterov;
    MomentumCoeffs mc;
    if (momentum) mc = method_schedule(method, std::max(1, T));

    if (dist.kind == SpectralDistribution::Kind::gamma) {
        using detail::Tracked;
        std::vector<Tracked> cur(n), old(n), q(n);
        for (std::size_t i = 0; i < n; ++i)
            cur[i] = old[i] = q[i] = detail::tracked_half_exp(rule.lambda[i]);
        auto accumulate = [&](int t) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                s += wl[i] * detail::tracked_square_value(cur[i]);
            out[t] = cl * s;
        };
        accumulate(0);
        for (int t = 1; t <= T; ++t) {
            if (momentum) {
                double a = mc.A[t], b = mc.B[t], c = 1.0 - a;
                for (std::size_t i = 0; i < n; ++i) {
                    Tracked next = detail::tracked_combine(a + b * rule.lambda[i],
                                                           cur[i], c, old[i]);
                    old[i] = cur[i];
                    cur[i] = next;
                }
            } else {
                double m = static_cast<double>(t - 1) / (t + 2.0);
                for (std::size_t i = 0; i < n; ++i) {
                    Tracked pn = detail::tracked_combine(
                        1.0 - rule.lambda[i] / method.L, q[i], 0.0, q[i]);
                    q[i] = detail::tracked_combine(1.0 + m, pn, -m, cur[i]);
                    cur[i] = pn;
                }
            }
            accumulate(t);
        }
        return out;
    }

    std::vector<double> cur(n, 1.0), old(n, 1.0), q(n, 1.0);
    std::vector<char> dead(n, 0);
    auto accumulate = [&](int t) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            s += dead[i] ? kInf : wl[i] * cur[i] * cur[i];
        out[t] = cl * s;
    };
    accumulate(0);
    for (int t = 1; t <= T; ++t) {
        if (momentum) {
            double a = mc.A[t], b = mc.B[t], c = 1.0 - a;
            for (std::size_t i = 0; i < n; ++i) {
                if (dead[i]) continue;
                double v = (a + b * rule.lambda[i]) * cur[i] + c * old[i];
                old[i] = cur[i];
                cur[i] = v;
                if (!(std::abs(v) < kBlowup)) dead[i] = 1;
            }
        } else {
            double m = static_cast<double>(t - 1) / (t + 2.0);
            for (std::size_t i = 0; i < n; ++i) {
                if (dead[i]) continue;
                double pn = (1.0 - rule.lambda[i] / method.L) * q[i];
                q[i] = pn + m * (pn - cur[i]);
                cur[i] = pn;
                if (!(std::abs(pn) < kBlowup) || !(std::abs(q[i]) < kBlowup))
                    dead[i] = 1;
            }
        }
        accumulate(t);
    }
    return out;
}

} // namespace

std::vector<double> expected_metric(const SpectralDistribution& dist,
                                    const Method& method, int l, int T) {
    if (T < 0) throw ArgumentError("expected_metric requires T >= 0");
    metric_prefactor(l); // validates l
    int n1 = std::max(256, T + 8);
    std::vector<double> coarse = metric_once(dist, method, l, T, n1);
    std::vector<double> fine = metric_once(dist, method, l, T, 2 * n1);
    for (int t = 0; t <= T; ++t) {
        double a = coarse[t], b = fine[t];
        if (std::isinf(a) || std::isinf(b)) continue;
        double mag = std::max(std::abs(a), std::abs(b));
        if (mag < 1e-280) continue;
        if (std::abs(a - b) > 1e-6 * mag)
            throw PrecisionError(
                "expected_metric: node-doubling self check failed at t=" +
                std::to_string(t));
    }
    return fine;
}

std::vector<double> worst_case_metric(const Method& method, int l, int T, double L) {
    if (T < 0) throw ArgumentError("worst_case_metric requires T >= 0");
    if (!(L > 0.0)) throw ArgumentError("worst_case_metric requires L > 0");
    double cl = metric_prefactor(l);
    int N = std::max(2000, 20 * T) + 1;
    std::vector<double> lambda(N), ll(N);
    for (int j = 0; j < N; ++j) {
        double s = std::sin(0.5 * kPi * j / (N - 1));
        lambda[j] = L * s * s;
        ll[j] = std::pow(lambda[j], l);
    }

    bool momentum = method.kind != Method::Kind::nesterov;
    MomentumCoeffs mc;
    if (momentum) mc = method_schedule(method, std::max(1, T));

    std::vector<double> cur(N, 1.0), old(N, 1.0), q(N, 1.0);
    std::vector<char> dead(N, 0);
    std::vector<double> out(T + 1, 0.0);
    auto scan = [&](int t) {
        double best = 0.0;
        for (int i = 0; i < N; ++i) {
            double v = dead[i] ? kInf : ll[i] * cur[i] * cur[i];
            if (v > best) best = v;
        }
        out[t] = cl * best;
    };
    scan(0);
    for (int t = 1; t <= T; ++t) {
        if (momentum) {
            double a = mc.A[t], b = mc.B[t], c = 1.0 - a;
            for (int i = 0; i < N; ++i) {
                if (dead[i]) continue;
                double v = (a + b * lambda[i]) * cur[i] + c * old[i];
                old[i] = cur[i];
                cur[i] = v;
                if (!(std::abs(v) < kBlowup)) dead[i] = 1;
            }
        } else {
            double m = static_cast<double>(t - 1) / (t + 2.0);
            for (int i = 0; i < N; ++i) {
                if (dead[i]) continue;
                double pn = (1.0 - lambda[i] / method.L) * q[i];
                q[i] = pn + m * (pn - cur[i]);
                cur[i] = pn;
                if (!(std::abs(pn) < kBlowup) || !(std::abs(q[i]) < kBlowup))
                    dead[i] = 1;
            }
        }
        scan(t);
    }
    return out;
}

} // namespace avgcase
