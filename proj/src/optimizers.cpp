#include "avgcase/optimizers.hpp"

#include <cmath>
#include <ostream>

#include "avgcase/errors.hpp"

namespace avgcase {

namespace {

struct Recorder {
    Trajectory& tr;
    const std::vector<double>& lam;
    double fgap0 = 0.0;

    // appends the metrics at z and enforces the divergence guard
    void record(const Eigen::VectorXd& z, int t) {
        double f = 0.0, g = 0.0, s = 0.0;
        for (int i = 0; i < z.size(); ++i) {
            double lz = lam[i] * z[i];
            f += 0.5 * lz * z[i];
            g += lz * lz;
            s += z[i] * z[i];
        }
        if (t == 0) fgap0 = f;
        if (!std::isfinite(f) || !std::isfinite(g) || !std::isfinite(s) ||
            f > 1e12 * fgap0) {
            throw DivergenceError(
                "iterate metrics blew up at step " + std::to_string(t), t - 1);
        }
        tr.fgap.push_back(f);
        tr.gradsq.push_back(g);
        tr.distsq.push_back(s);
    }
};

Trajectory make_trajectory(const QuadraticProblem& p, std::string method, int T) {
    Trajectory tr;
    tr.method = std::move(method);
    tr.provenance = p.provenance;
    tr.fgap.reserve(T + 1);
    tr.gradsq.reserve(T + 1);
    tr.distsq.reserve(T + 1);
    tr.coeff_a.assign(1, 0.0);
    tr.coeff_b.assign(1, 0.0);
    return tr;
}

// Shared loop for methods of the form
// x_t = x_{t-1} + (A_t - 1)(x_{t-1} - x_{t-2}) + B_t grad f(x_{t-1}),
// run in the eigenbasis where grad f has coordinates lambda_i z_i.
Trajectory run_momentum(const QuadraticProblem& p, const MomentumCoeffs& mc, int T,
                        std::string method) {
    Trajectory tr = make_trajectory(p, std::move(method), T);
    Recorder rec{tr, p.eigvals};
    Eigen::VectorXd prev = p.z0, cur = p.z0, next(p.d);
    rec.record(cur, 0);
    for (int t = 1; t <= T; ++t) {
        double a = mc.A[t], b = mc.B[t];
        for (int i = 0; i < p.d; ++i)
            next[i] = cur[i] + (a - 1.0) * (cur[i] - prev[i]) +
                      b * p.eigvals[i] * cur[i];
        prev = cur;
        cur = next;
        rec.record(cur, t);
        tr.coeff_a.push_back(a - 1.0);
        tr.coeff_b.push_back(b);
    }
    return tr;
}

} // namespace

Trajectory run_gcm(const QuadraticProblem& problem, double alpha, double beta,
                   double L, int T) {
    if (T < 1) throw ArgumentError("run_gcm requires T >= 1");
    MomentumCoeffs mc = gcm_coeffs(T, alpha, beta, L);
    return run_momentum(problem, mc, T,
                        Method::gcm(alpha, beta, L).describe());
}

Trajectory run_laguerre(const QuadraticProblem& problem, double alpha, int T) {
    if (T < 1) throw ArgumentError("run_laguerre requires T >= 1");
    MomentumCoeffs mc = laguerre_coeffs(T, alpha);
    return run_momentum(problem, mc, T, Method::laguerre(alpha).describe());
}

Trajectory run_nesterov(const QuadraticProblem& problem, double L, int T) {
    if (T < 1) throw ArgumentError("run_nesterov requires T >= 1");
    if (!(L > 0.0)) throw ArgumentError("run_nesterov requires L > 0");
    Trajectory tr = make_trajectory(problem, Method::nesterov(L).describe(), T);
    Recorder rec{tr, problem.eigvals};
    int d = problem.d;
    Eigen::VectorXd x = problem.z0, y = problem.z0, xnext(d);
    rec.record(x, 0);
    for (int t = 1; t <= T; ++t) {
        // y was built after producing x_{t-1}; this step produces x_t
        for (int i = 0; i < d; ++i)
            xnext[i] = y[i] - (1.0 / L) * problem.eigvals[i] * y[i];
        double m = static_cast<double>(t - 1) / (t + 2.0);
        for (int i = 0; i < d; ++i)
            y[i] = xnext[i] + m * (xnext[i] - x[i]);
        x = xnext;
        rec.record(x, t);
        tr.coeff_a.push_back(t >= 2 ? static_cast<double>(t - 2) / (t + 1.0) : 0.0);
        tr.coeff_b.push_back(-1.0 / L);
    }
    return tr;
}

Trajectory run_gd(const QuadraticProblem& problem, double L, int T) {
    if (T < 1) throw ArgumentError("run_gd requires T >= 1");
    MomentumCoeffs mc = gd_coeffs(T, L);
    return run_momentum(problem, mc, T, Method::gd(L).describe());
}

Trajectory run_method(const QuadraticProblem& problem, const Method& method, int T) {
    switch (method.kind) {
    case Method::Kind::gcm:
        return run_gcm(problem, method.alpha, method.beta, method.L, T);
    case Method::Kind::laguerre:
        return run_laguerre(problem, method.alpha, T);
    case Method::Kind::nesterov:
        return run_nesterov(problem, method.L, T);
    case Method::Kind::gd:
        return run_gd(problem, method.L, T);
    }
    throw ArgumentError("run_method: invalid method kind");
}

void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out) {
    out << "# method: " << trajectory.method << "\n";
    out << "# provenance: " << trajectory.provenance << "\n";
    out << "# seed: " << trajectory.seed << "\n";
    out << "t,fgap,gradsq,distsq\n";
    char buf[128];
    for (std::size_t t = 0; t < trajectory.fgap.size(); ++t) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g\n", t,
                      trajectory.fgap[t], trajectory.gradsq[t],
                      trajectory.distsq[t]);
        out << buf;
    }
}

} // namespace avgcase
