#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "avgcase/rng.hpp"

namespace avgcase {

// Random quadratic instance f(x) = 1/2 x^T H x with H = U diag(eigvals) U^T,
// minimizer at the origin, f* = 0. Held as its eigendecomposition so that
// optimizer steps and metric evaluation are elementwise in the eigenbasis.
struct QuadraticProblem {
    int d = 0;
    std::vector<double> eigvals; // ascending, all >= 0
    Eigen::MatrixXd U;           // orthonormal, H = U diag(eigvals) U^T
    Eigen::VectorXd x0;          // initial point, i.i.d. standard Gaussian
    Eigen::VectorXd z0;          // U^T x0 (eigenbasis coordinates of x0)
    double L_instance = 0.0;     // largest eigenvalue
    std::string provenance;      // generator description for output headers
};

struct Metrics {
    double fgap;   // f(x) - f* = 1/2 x^T H x
    double gradsq; // ||H x||^2
    double distsq; // ||x||^2
};

// Gram instance H = X X^T with X d-by-n of i.i.d. N(0, sigma2/d) entries;
// as n, d grow with n/d = r fixed, the bulk spectrum approaches the
// Marchenko-Pastur law with ratio r and scale sigma2. Draw order: X, then x0.
QuadraticProblem gram_problem(int n, int d, double sigma2, Rng& rng);

// Instance with the given spectrum and an independent Haar-random basis
// (QR of a Gaussian matrix with the R diagonal sign-corrected).
// Draw order: U, then x0.
QuadraticProblem spectrum_problem(const std::vector<double>& eigvals, Rng& rng);

// Metrics of the iterate x, evaluated by one rotation into the eigenbasis.
Metrics metrics(const QuadraticProblem& problem, const Eigen::VectorXd& x);

} // namespace avgcase
