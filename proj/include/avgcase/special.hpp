#pragma once

namespace avgcase {

/// log of the Euler beta function B(a, b) = Gamma(a)Gamma(b)/Gamma(a+b),
/// for a, b > 0.
double log_beta(double a, double b);

/// Regularized incomplete beta function I_x(a, b) for a, b > 0 and
/// x in [0, 1], evaluated with the standard continued fraction
/// (modified Lentz), accurate to ~1e-14 relative.
double reg_inc_beta(double x, double a, double b);

/// Binomial coefficient C(n, k) for real n > -1 and integer k >= 0,
/// computed through lgamma so that large arguments stay finite in logs.
double binomial(double n, int k);

} // namespace avgcase
