#pragma once

#include <string>
#include <vector>

#include "avgcase/spectra.hpp"

namespace avgcase {

// One degree's triple for the three-term recurrence
// p_t(x) = (c0_t + c1_t x) p_{t-1}(x) + g_t p_{t-2}(x).
struct CoefficientTriple {
    double c0, c1, g;
};

// Per-degree recurrence triples for t = 1..degree() with p_0 = 1 and
// p_{-1} = 0 (index 0 is unused padding so vector index equals degree).
// Residual-form tables produced by to_residual satisfy c0_t + g_t = 1 and
// are run with P_{-1} = P_0 = 1; the two conventions agree because the
// first degree always has g_1 = 0.
struct RecurrenceCoefficients {
    std::vector<double> c0, c1, g;
    int degree() const { return static_cast<int>(c0.size()) - 1; }
};

// Step schedule of a momentum method, the (A_t, B_t) of
// x_t = x_{t-1} + (A_t - 1)(x_{t-1} - x_{t-2}) + B_t grad f(x_{t-1}),
// equivalently the residual recurrence P_t = (A_t + B_t lambda) P_{t-1}
// + (1 - A_t) P_{t-2}. Entries valid for t = 1..steps(); index 0 unused.
struct MomentumCoeffs {
    std::vector<double> A, B;
    int steps() const { return static_cast<int>(A.size()) - 1; }
};

// Classical recurrence triple of the degree-t Jacobi polynomial P_t^{(a,b)}
// on [-1, 1] (weight (1-x)^a (1+x)^b). Degree 1 has its own closed form;
// for t >= 2 a vanishing denominator (possible only for a, b outside
// (-1, inf)) raises SingularCoefficientError.
CoefficientTriple jacobi_raw_coefficients(int t, double a, double b);

// Triples for all degrees 1..T.
RecurrenceCoefficients jacobi_raw_table(int T, double a, double b);

// Coefficients of q_t(x) = p_t(a x + b) given those of p_t.
RecurrenceCoefficients shift_affine(const RecurrenceCoefficients& coeffs, double a,
                                    double b);

// Normalizes a polynomial family to residual form P_t = p_t / p_t(0),
// returning the recurrence P_t = (A_t + B_t lambda) P_{t-1} + (1 - A_t)
// P_{t-2} as a table with c0 = A, c1 = B, g = 1 - A. Throws DegeneracyError
// if some p_t(0) vanishes.
RecurrenceCoefficients to_residual(const RecurrenceCoefficients& coeffs);

// A first-order method on quadratics, identified by the family of residual
// polynomials it generates.
struct Method {
    enum class Kind { gcm, laguerre, nesterov, gd };
    Kind kind;
    double alpha = 0.0; // gcm, laguerre
    double beta = 0.0;  // gcm
    double L = 0.0;     // gcm, nesterov, gd

    // Momentum method whose residuals are shifted Jacobi polynomials,
    // orthogonal for lambda^beta (L - lambda)^alpha on [0, L].
    static Method gcm(double alpha, double beta, double L);
    // Momentum method whose residuals are normalized Laguerre polynomials
    // of parameter alpha (no smoothness scale; targets unbounded spectra).
    static Method laguerre(double alpha);
    // Accelerated gradient descent with momentum (t-1)/(t+2) and step 1/L.
    static Method nesterov(double L);
    // Gradient descent with step 1/L.
    static Method gd(double L);

    std::string describe() const;
};

// Momentum schedules of the closed-form families. gcm_coeffs cross-checks
// the schedule through two algebraically equivalent normalization routes
// and throws PrecisionError if they disagree.
MomentumCoeffs gcm_coeffs(int T, double alpha, double beta, double L);
MomentumCoeffs laguerre_coeffs(int T, double alpha);
MomentumCoeffs gd_coeffs(int T, double L);

// Residual polynomial values: row t in 0..T holds P_t evaluated at each
// grid point. gd_polynomial is (1 - lambda/L)^t; the Nesterov family obeys
// the coupled recurrence P_{t+1} = (1 - lambda/L) Q_t,
// Q_{t+1} = P_{t+1} + (t/(t+3)) (P_{t+1} - P_t), P_0 = Q_0 = 1.
using PolyTable = std::vector<std::vector<double>>;
PolyTable gcm_polynomials(double alpha, double beta, double L, int T,
                          const std::vector<double>& lambda);
PolyTable laguerre_polynomials(double alpha, int T, const std::vector<double>& lambda);
PolyTable nesterov_polynomials(double L, int T, const std::vector<double>& lambda);
PolyTable gd_polynomial(double L, int T, const std::vector<double>& lambda);

// Dispatch on method kind.
PolyTable residual_values(const Method& method, int T,
                          const std::vector<double>& lambda);

// Expected per-dimension metric at t = 0..T for unit initial distance:
//   l = 0:  E ||x_t - x*||^2        = integral P_t^2 dmu
//   l = 1:  E [f(x_t) - f*]         = 1/2 integral P_t^2 lambda dmu
//   l = 2:  E ||grad f(x_t)||^2     = integral P_t^2 lambda^2 dmu
// evaluated by Gauss quadrature with a node-doubling self check
// (PrecisionError on disagreement). Divergent tails come back as +inf.
std::vector<double> expected_metric(const SpectralDistribution& dist,
                                    const Method& method, int l, int T);

// Worst-case metric sup over lambda in [0, L] of c_l P_t(lambda)^2 lambda^l,
// approximated on a dense edge-clustered grid.
std::vector<double> worst_case_metric(const Method& method, int l, int T, double L);

} // namespace avgcase
