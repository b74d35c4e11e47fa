#pragma once

#include <vector>

#include "avgcase/spectra.hpp"

namespace avgcase {

/// Nodes and weights approximating integrals against a probability measure:
///   integral of g dmu  ~=  sum_i weight[i] * exp(log_scale[i]) * g(lambda[i]).
/// For compactly supported measures log_scale is identically zero.  For the
/// gamma measure the true weights underflow past the first few hundred nodes,
/// so weight[i] holds the exp(+lambda[i])-scaled value and log_scale[i] =
/// -lambda[i]; integrators that know their integrand's growth (the
/// residual-polynomial metrics) cancel the scale analytically instead of
/// multiplying it out.
struct QuadratureRule {
    std::vector<double> lambda;
    std::vector<double> weight;
    std::vector<double> log_scale;

    std::size_t size() const { return lambda.size(); }
};

/// Gauss rule with n nodes for the Jacobi weight (1-x)^a (1+x)^b on [-1, 1],
/// normalized to total mass 1.  Computed by the Golub-Welsch method: nodes are
/// eigenvalues of the symmetric tridiagonal recurrence matrix, weights come
/// from the Christoffel function evaluated through the orthonormal recurrence.
QuadratureRule gauss_jacobi(int n, double a, double b);

/// Gauss rule with n nodes for the weight x^alpha e^{-x} on [0, inf),
/// normalized to mass 1 and returned in the scaled form described above
/// (weight[i] = w_i * e^{x_i}, log_scale[i] = -x_i).
QuadratureRule gauss_laguerre(int n, double alpha);

/// Rule adapted to a density-bearing SpectralDistribution: Beta maps the
/// Jacobi rule onto [0, L]; Marchenko-Pastur with r = 1 is routed through its
/// exact Beta form, r < 1 folds the analytic 1/lambda factor of the bulk
/// density into a Chebyshev-type rule; Gamma uses the scaled Laguerre rule.
/// Weights always sum (in true scale) to 1.
QuadratureRule quadrature_nodes(const SpectralDistribution& dist, int n_nodes);

/// Plain functional integration against a rule, for tests and moments.
/// Underflowed true weights contribute zero, which is correct for integrands
/// of at most polynomial growth.
template <typename F>
double integrate(const QuadratureRule& rule, F&& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        double w = rule.weight[i];
        if (rule.log_scale[i] != 0.0) w *= std::exp(rule.log_scale[i]);
        s += w * f(rule.lambda[i]);
    }
    return s;
}

} // namespace avgcase
