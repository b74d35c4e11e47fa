#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "avgcase/polynomials.hpp"
#include "avgcase/problems.hpp"

namespace avgcase {

// Metric trajectory of one optimizer run. Entry 0 is the metric at x0;
// entries are finite and nonnegative (divergence aborts the run with an
// error instead of emitting bad rows). coeff_a/coeff_b record the momentum
// and gradient coefficients actually applied at each step (index 1..T,
// index 0 unused); they depend only on (t, method parameters), never on
// the problem.
struct Trajectory {
    std::string method;     // method descriptor, e.g. "gcm(alpha=0.5, ...)"
    std::string provenance; // problem generator descriptor
    std::uint64_t seed = 0; // filled by the harness
    std::vector<double> fgap, gradsq, distsq;
    std::vector<double> coeff_a, coeff_b;
};

// Momentum method with shifted-Jacobi residuals; the step schedule is
// cross-validated through two normalization routes before use.
Trajectory run_gcm(const QuadraticProblem& problem, double alpha, double beta,
                   double L, int T);

// x_t = x_{t-1} + ((t-1)/(t+alpha)) (x_{t-1} - x_{t-2})
//     - (1/(t+alpha)) grad f(x_{t-1})
Trajectory run_laguerre(const QuadraticProblem& problem, double alpha, int T);

// x_{t+1} = y_t - (1/L) grad f(y_t), y_{t+1} = x_{t+1}
//     + (t/(t+3)) (x_{t+1} - x_t), y_0 = x_0; metrics recorded at x_t.
Trajectory run_nesterov(const QuadraticProblem& problem, double L, int T);

// x_{t+1} = x_t - (1/L) grad f(x_t)
Trajectory run_gd(const QuadraticProblem& problem, double L, int T);

// Dispatch on method kind (gcm/laguerre use the method's parameters;
// nesterov/gd use method.L).
Trajectory run_method(const QuadraticProblem& problem, const Method& method, int T);

// CSV serialization: '#'-comment header with method, provenance and seed,
// then `t,fgap,gradsq,distsq` rows at full precision.
void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out);

} // namespace avgcase
