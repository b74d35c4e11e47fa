#include "avgcase/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "avgcase/errors.hpp"
#include "tracked.hpp"

namespace avgcase {

namespace {

// Monic three-term recurrence coefficients (diagonal alpha_k, squared
// off-diagonal beta_k) of the orthogonal polynomials for a weight; the
// Golub-Welsch nodes are the eigenvalues of the symmetric tridiagonal
// matrix with diag alpha_k and off-diag sqrt(beta_k).
struct JacobiMatrix {
    std::vector<double> diag;    // alpha_0 .. alpha_{n-1}
    std::vector<double> offdiag; // sqrt(beta_1) .. sqrt(beta_{n-1})
};

JacobiMatrix jacobi_weight_matrix(int n, double a, double b) {
    JacobiMatrix m;
    m.diag.resize(n);
    m.offdiag.resize(n - 1);
    double s = a + b;
    m.diag[0] = (b - a) / (s + 2.0);
    for (int k = 1; k < n; ++k) {
        double two = 2.0 * k + s;
        m.diag[k] = (b * b - a * a) / (two * (two + 2.0));
    }
    if (n > 1) {
        // k = 1 uses the cancelled form: the general formula is 0/0 when
        // a + b = -1.
        m.offdiag[0] =
            std::sqrt(4.0 * (a + 1.0) * (b + 1.0) / ((s + 2.0) * (s + 2.0) * (s + 3.0)));
    }
    for (int k = 2; k < n; ++k) {
        double two = 2.0 * k + s;
        double beta = 4.0 * k * (k + a) * (k + b) * (k + s) /
                      (two * two * (two + 1.0) * (two - 1.0));
        m.offdiag[k - 1] = std::sqrt(beta);
    }
    return m;
}

JacobiMatrix laguerre_weight_matrix(int n, double alpha) {
    JacobiMatrix m;
    m.diag.resize(n);
    m.offdiag.resize(n - 1);
    for (int k = 0; k < n; ++k) m.diag[k] = 2.0 * k + alpha + 1.0;
    for (int k = 1; k < n; ++k) m.offdiag[k - 1] = std::sqrt(k * (k + alpha));
    return m;
}

Eigen::VectorXd tridiagonal_eigenvalues(const JacobiMatrix& m) {
    int n = static_cast<int>(m.diag.size());
    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(m.diag.data(), n);
    Eigen::VectorXd sub =
        n > 1 ? Eigen::Map<const Eigen::VectorXd>(m.offdiag.data(), n - 1)
              : Eigen::VectorXd();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

// Christoffel weight 1/sum_k p_k(x)^2 with orthonormal p_k, p_0 = 1.
// Valid whenever the p_k stay inside double range (all Jacobi-weight cases).
double christoffel_weight(const JacobiMatrix& m, double x) {
    int n = static_cast<int>(m.diag.size());
    double p_prev = 0.0, p_cur = 1.0, s = 1.0;
    for (int k = 0; k + 1 < n; ++k) {
        double p_next =
            ((x - m.diag[k]) * p_cur - (k > 0 ? m.offdiag[k - 1] : 0.0) * p_prev) /
            m.offdiag[k];
        p_prev = p_cur;
        p_cur = p_next;
        s += p_cur * p_cur;
    }
    return 1.0 / s;
}

// Scaled Christoffel weight for the Laguerre measure: returns
// w(x) * e^{x} = 1 / sum_k (p_k(x) e^{-x/2})^2, with the scaled recurrence
// tracked in mantissa/exponent form (the unscaled p_k overflow, the naive
// scaled q_k underflow; neither is representable in plain doubles).
double scaled_laguerre_weight(const JacobiMatrix& m, double x) {
    using detail::Tracked;
    using detail::tracked_normalize;
    int n = static_cast<int>(m.diag.size());
    Tracked cur = detail::tracked_half_exp(x);
    Tracked prev = {0.0, 0};
    // running sum of q_k^2 in tracked form
    double sum_frac = cur.frac * cur.frac;
    long sum_exp = 2 * cur.exp2;
    auto add_square = [&](const Tracked& q) {
        if (q.frac == 0.0) return;
        double f = q.frac * q.frac;
        long e = 2 * q.exp2;
        if (e > sum_exp) {
            long d = sum_exp - e;
            sum_frac = (d < -4096 ? 0.0 : std::ldexp(sum_frac, static_cast<int>(d))) + f;
            sum_exp = e;
        } else {
            long d = e - sum_exp;
            sum_frac += d < -4096 ? 0.0 : std::ldexp(f, static_cast<int>(d));
        }
        Tracked t = tracked_normalize(sum_frac, sum_exp);
        sum_frac = t.frac;
        sum_exp = t.exp2;
    };
    for (int k = 0; k + 1 < n; ++k) {
        // align prev to cur's exponent before combining
        long d = prev.exp2 - cur.exp2;
        double prev_aligned = d < -4096 ? 0.0 : std::ldexp(prev.frac, static_cast<int>(d));
        double v = ((x - m.diag[k]) * cur.frac -
                    (k > 0 ? m.offdiag[k - 1] : 0.0) * prev_aligned) /
                   m.offdiag[k];
        prev = cur;
        cur = tracked_normalize(v, cur.exp2);
        add_square(cur);
    }
    // w e^x = 2^{-sum_exp} / sum_frac
    return std::ldexp(1.0 / sum_frac, static_cast<int>(-sum_exp));
}

void normalize_mass(QuadratureRule& rule, bool scaled) {
    double z = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        double w = rule.weight[i];
        if (scaled) w *= std::exp(rule.log_scale[i]);
        z += w;
    }
    for (auto& w : rule.weight) w /= z;
}

} // namespace

QuadratureRule gauss_jacobi(int n, double a, double b) {
    if (n < 2) throw ArgumentError("gauss_jacobi requires n >= 2");
    if (!(a > -1.0) || !(b > -1.0))
        throw ArgumentError("gauss_jacobi requires exponents > -1");
    JacobiMatrix m = jacobi_weight_matrix(n, a, b);
    Eigen::VectorXd nodes = tridiagonal_eigenvalues(m);
    QuadratureRule rule;
    rule.lambda.resize(n);
    rule.weight.resize(n);
    rule.log_scale.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        rule.lambda[i] = nodes[i];
        rule.weight[i] = christoffel_weight(m, nodes[i]);
    }
    normalize_mass(rule, false);
    return rule;
}

QuadratureRule gauss_laguerre(int n, double alpha) {
    if (n < 2) throw ArgumentError("gauss_laguerre requires n >= 2");
    if (!(alpha > -1.0)) throw ArgumentError("gauss_laguerre requires alpha > -1");
    JacobiMatrix m = laguerre_weight_matrix(n, alpha);
    Eigen::VectorXd nodes = tridiagonal_eigenvalues(m);
    QuadratureRule rule;
    rule.lambda.resize(n);
    rule.weight.resize(n);
    rule.log_scale.resize(n);
    for (int i = 0; i < n; ++i) {
        rule.lambda[i] = nodes[i];
        rule.weight[i] = scaled_laguerre_weight(m, nodes[i]);
        rule.log_scale[i] = -nodes[i];
    }
    normalize_mass(rule, true);
    return rule;
}

QuadratureRule quadrature_nodes(const SpectralDistribution& dist, int n_nodes) {
    if (n_nodes < 2) throw ArgumentError("quadrature_nodes requires n_nodes >= 2");
    switch (dist.kind) {
    case SpectralDistribution::Kind::beta: {
        QuadratureRule rule = gauss_jacobi(n_nodes, dist.tau, dist.xi);
        for (auto& x : rule.lambda) x = dist.L * 0.5 * (1.0 + x);
        return rule;
    }
    case SpectralDistribution::Kind::marchenko_pastur: {
        double sr = std::sqrt(dist.r);
        if (dist.r == 1.0) {
            // exact coincidence with Beta(1/2, -1/2, 4 sigma2)
            QuadratureRule rule = gauss_jacobi(n_nodes, 0.5, -0.5);
            for (auto& x : rule.lambda) x = 4.0 * dist.sigma2 * 0.5 * (1.0 + x);
            return rule;
        }
        double lo = dist.sigma2 * (1.0 - sr) * (1.0 - sr);
        double hi = dist.sigma2 * (1.0 + sr) * (1.0 + sr);
        double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        // Chebyshev-type rule for the sqrt((hi-x)(x-lo)) factor; the analytic
        // 1/lambda factor of the bulk density is folded into the weights
        // (lambda is bounded away from 0 here since r < 1).
        QuadratureRule rule = gauss_jacobi(n_nodes, 0.5, 0.5);
        for (std::size_t i = 0; i < rule.size(); ++i) {
            rule.lambda[i] = mid + half * rule.lambda[i];
            rule.weight[i] /= rule.lambda[i];
        }
        normalize_mass(rule, false);
        return rule;
    }
    case SpectralDistribution::Kind::gamma:
        return gauss_laguerre(n_nodes, dist.alpha);
    case SpectralDistribution::Kind::empirical:
        throw UnsupportedError("quadrature_nodes: empirical spectra have no density");
    }
    throw ArgumentError("quadrature_nodes: invalid distribution kind");
}

} // namespace avgcase
