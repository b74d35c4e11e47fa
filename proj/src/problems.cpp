#include "avgcase/problems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "avgcase/errors.hpp"

namespace avgcase {

namespace {

Eigen::VectorXd gaussian_vector(int d, Rng& rng) {
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v[i] = rng.normal();
    return v;
}

void finish(QuadraticProblem& p, Rng& rng) {
    p.d = static_cast<int>(p.eigvals.size());
    p.L_instance = p.eigvals.back();
    p.x0 = gaussian_vector(p.d, rng);
    p.z0 = p.U.transpose() * p.x0;
}

} // namespace

QuadraticProblem gram_problem(int n, int d, double sigma2, Rng& rng) {
    if (n < 1 || d < 1) throw ArgumentError("gram_problem requires n, d >= 1");
    if (!(sigma2 > 0.0)) throw ArgumentError("gram_problem requires sigma2 > 0");
    double scale = std::sqrt(sigma2 / d);
    Eigen::MatrixXd X(d, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < d; ++i) X(i, j) = scale * rng.normal();
    Eigen::MatrixXd H = X * X.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    QuadraticProblem p;
    p.eigvals.resize(d);
    for (int i = 0; i < d; ++i)
        p.eigvals[i] = std::max(0.0, es.eigenvalues()[i]); // clamp eigensolver roundoff
    p.U = es.eigenvectors();
    char buf[96];
    std::snprintf(buf, sizeof(buf), "gram(n=%d, d=%d, sigma2=%g)", n, d, sigma2);
    p.provenance = buf;
    finish(p, rng);
    return p;
}

QuadraticProblem spectrum_problem(const std::vector<double>& eigvals, Rng& rng) {
    if (eigvals.empty()) throw ArgumentError("spectrum_problem requires d >= 1");
    for (double v : eigvals)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw ArgumentError("spectrum_problem eigenvalues must be finite and >= 0");
    int d = static_cast<int>(eigvals.size());
    Eigen::MatrixXd G(d, d);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) G(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
    // sign-correct so the distribution is Haar rather than biased by QR's
    // R-diagonal sign convention
    for (int j = 0; j < d; ++j)
        if (qr.matrixQR()(j, j) < 0.0) Q.col(j) = -Q.col(j);
    QuadraticProblem p;
    p.eigvals = eigvals;
    std::sort(p.eigvals.begin(), p.eigvals.end());
    p.U = std::move(Q);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "spectrum(d=%d)", d);
    p.provenance = buf;
    finish(p, rng);
    return p;
}

Metrics metrics(const QuadraticProblem& problem, const Eigen::VectorXd& x) {
    if (x.size() != problem.d)
        throw ArgumentError("metrics: vector length does not match problem dimension");
    Eigen::VectorXd z = problem.U.transpose() * x;
    Metrics m{0.0, 0.0, 0.0};
    for (int i = 0; i < problem.d; ++i) {
        double lz = problem.eigvals[i] * z[i];
        m.fgap += 0.5 * lz * z[i];
        m.gradsq += lz * lz;
    }
    m.distsq = x.squaredNorm();
    return m;
}

} // namespace avgcase
