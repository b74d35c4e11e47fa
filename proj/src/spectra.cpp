#include "avgcase/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "avgcase/errors.hpp"
#include "avgcase/special.hpp"

namespace avgcase {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kCdfTablePoints = 10000;

std::string format_params(const char* fmt, double a, double b, double c) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), fmt, a, b, c);
    return buf;
}

// Inverse-CDF sampling from a tabulated (lambda, cdf) curve with cdf
// increasing from 0 to 1; linear interpolation between table rows.
double sample_from_table(const std::vector<double>& lambda,
                         const std::vector<double>& cdf, double u) {
    auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.begin()) return lambda.front();
    if (it == cdf.end()) return lambda.back();
    std::size_t j = static_cast<std::size_t>(it - cdf.begin());
    double dc = cdf[j] - cdf[j - 1];
    if (dc <= 0.0) return lambda[j];
    double t = (u - cdf[j - 1]) / dc;
    return lambda[j - 1] + t * (lambda[j] - lambda[j - 1]);
}

// lambda = L sin^2(theta/2) on a uniform theta grid: clusters table rows at
// both support edges, where the Beta-type densities vary fastest.
void beta_cdf_table(double tau, double xi, double L, std::vector<double>& lambda,
                    std::vector<double>& cdf) {
    int n = kCdfTablePoints;
    lambda.resize(n);
    cdf.resize(n);
    for (int j = 0; j < n; ++j) {
        double theta = kPi * j / (n - 1);
        double s = std::sin(0.5 * theta);
        double x = s * s;
        lambda[j] = L * x;
        cdf[j] = reg_inc_beta(x, xi + 1.0, tau + 1.0);
    }
    cdf.front() = 0.0;
    cdf.back() = 1.0;
}

// Numeric CDF of the Marchenko-Pastur bulk for r < 1. With
// lambda(theta) = mid - half cos(theta) the density becomes the smooth
// integrand half^2 sin^2(theta) / (2 pi sigma2 r lambda(theta)); cumulative
// composite Simpson on a uniform theta grid, renormalized to end at 1.
void mp_cdf_table(double r, double sigma2, std::vector<double>& lambda,
                  std::vector<double>& cdf) {
    int n = kCdfTablePoints | 1; // odd count, even interval number
    double sr = std::sqrt(r);
    double lo = sigma2 * (1.0 - sr) * (1.0 - sr);
    double hi = sigma2 * (1.0 + sr) * (1.0 + sr);
    double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double h = kPi / (n - 1);
    std::vector<double> g(n);
    lambda.resize(n);
    for (int j = 0; j < n; ++j) {
        double theta = h * j;
        lambda[j] = mid - half * std::cos(theta);
        double s = std::sin(theta);
        g[j] = half * half * s * s / (2.0 * kPi * sigma2 * r * lambda[j]);
    }
    cdf.assign(n, 0.0);
    for (int j = 2; j < n; j += 2)
        cdf[j] = cdf[j - 2] + h / 3.0 * (g[j - 2] + 4.0 * g[j - 1] + g[j]);
    for (int j = 1; j < n; j += 2)
        cdf[j] = cdf[j - 1] + h / 12.0 * (5.0 * g[j - 1] + 8.0 * g[j] - g[j + 1]);
    double z = cdf[n - 1];
    for (auto& c : cdf) c /= z;
    cdf.front() = 0.0;
    cdf.back() = 1.0;
}

} // namespace

SpectralDistribution SpectralDistribution::beta_dist(double tau, double xi, double L) {
    if (!(tau > -1.0) || !(xi > -1.0))
        throw ArgumentError("beta distribution requires tau > -1 and xi > -1");
    if (!(L > 0.0)) throw ArgumentError("beta distribution requires L > 0");
    SpectralDistribution d;
    d.kind = Kind::beta;
    d.tau = tau;
    d.xi = xi;
    d.L = L;
    return d;
}

SpectralDistribution SpectralDistribution::marchenko_pastur(double r, double sigma2) {
    if (!(r > 0.0)) throw ArgumentError("marchenko_pastur requires r > 0");
    if (r > 1.0)
        throw UnsupportedError(
            "marchenko_pastur with r > 1 has an atom at zero; only the bulk law "
            "with r <= 1 is supported");
    if (!(sigma2 > 0.0)) throw ArgumentError("marchenko_pastur requires sigma2 > 0");
    SpectralDistribution d;
    d.kind = Kind::marchenko_pastur;
    d.r = r;
    d.sigma2 = sigma2;
    return d;
}

SpectralDistribution SpectralDistribution::gamma_dist(double alpha) {
    if (!(alpha > -1.0)) throw ArgumentError("gamma distribution requires alpha > -1");
    SpectralDistribution d;
    d.kind = Kind::gamma;
    d.alpha = alpha;
    return d;
}

SpectralDistribution SpectralDistribution::empirical(std::vector<double> eigenvalues) {
    if (eigenvalues.empty())
        throw ArgumentError("empirical distribution requires at least one eigenvalue");
    for (double v : eigenvalues)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw ArgumentError("empirical eigenvalues must be finite and nonnegative");
    std::sort(eigenvalues.begin(), eigenvalues.end());
    SpectralDistribution d;
    d.kind = Kind::empirical;
    d.eigenvalues = std::move(eigenvalues);
    return d;
}

SpectralDistribution SpectralDistribution::empirical_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open eigenvalue file: " + path);
    std::vector<double> vals;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double v;
        while (ls >> v) vals.push_back(v);
        if (!ls.eof())
            throw ArgumentError("malformed eigenvalue file: " + path);
    }
    if (vals.empty())
        throw ArgumentError("eigenvalue file contains no values: " + path);
    return empirical(std::move(vals));
}

std::string SpectralDistribution::describe() const {
    switch (kind) {
    case Kind::beta:
        return format_params("beta(tau=%g, xi=%g, L=%g)", tau, xi, L);
    case Kind::marchenko_pastur:
        return format_params("marchenko_pastur(r=%g, sigma2=%g)", r, sigma2, 0.0);
    case Kind::gamma:
        return format_params("gamma(alpha=%g)", alpha, 0.0, 0.0);
    case Kind::empirical: {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "empirical(%zu eigenvalues)",
                      eigenvalues.size());
        return buf;
    }
    }
    return "invalid";
}

double density(const SpectralDistribution& dist, double lambda) {
    switch (dist.kind) {
    case SpectralDistribution::Kind::beta: {
        if (lambda < 0.0 || lambda > dist.L) return 0.0;
        double logz = (dist.tau + dist.xi + 1.0) * std::log(dist.L) +
                      log_beta(dist.xi + 1.0, dist.tau + 1.0);
        return std::pow(lambda, dist.xi) * std::pow(dist.L - lambda, dist.tau) *
               std::exp(-logz);
    }
    case SpectralDistribution::Kind::marchenko_pastur: {
        double sr = std::sqrt(dist.r);
        double lo = dist.sigma2 * (1.0 - sr) * (1.0 - sr);
        double hi = dist.sigma2 * (1.0 + sr) * (1.0 + sr);
        if (lambda < lo || lambda > hi) return 0.0;
        return std::sqrt((hi - lambda) * (lambda - lo)) /
               (2.0 * kPi * dist.sigma2 * dist.r * lambda);
    }
    case SpectralDistribution::Kind::gamma:
        // pow, not exp(alpha log lambda): the latter is NaN at the
        // lambda = 0, alpha = 0 endpoint where the density is 1.
        if (lambda < 0.0) return 0.0;
        return std::pow(lambda, dist.alpha) *
               std::exp(-lambda - std::lgamma(dist.alpha + 1.0));
    case SpectralDistribution::Kind::empirical:
        throw UnsupportedError("density: empirical spectra have no density");
    }
    throw ArgumentError("density: invalid distribution kind");
}

std::pair<double, double> support(const SpectralDistribution& dist) {
    switch (dist.kind) {
    case SpectralDistribution::Kind::beta:
        return {0.0, dist.L};
    case SpectralDistribution::Kind::marchenko_pastur: {
        double sr = std::sqrt(dist.r);
        return {dist.sigma2 * (1.0 - sr) * (1.0 - sr),
                dist.sigma2 * (1.0 + sr) * (1.0 + sr)};
    }
    case SpectralDistribution::Kind::gamma:
        return {0.0, std::numeric_limits<double>::infinity()};
    case SpectralDistribution::Kind::empirical:
        return {dist.eigenvalues.front(), dist.eigenvalues.back()};
    }
    throw ArgumentError("support: invalid distribution kind");
}

double dist_mean(const SpectralDistribution& dist) {
    switch (dist.kind) {
    case SpectralDistribution::Kind::beta:
        return dist.L * (dist.xi + 1.0) / (dist.tau + dist.xi + 2.0);
    case SpectralDistribution::Kind::marchenko_pastur:
        return dist.sigma2;
    case SpectralDistribution::Kind::gamma:
        return dist.alpha + 1.0;
    case SpectralDistribution::Kind::empirical:
        return std::accumulate(dist.eigenvalues.begin(), dist.eigenvalues.end(), 0.0) /
               static_cast<double>(dist.eigenvalues.size());
    }
    throw ArgumentError("dist_mean: invalid distribution kind");
}

std::vector<double> sample_eigenvalues(const SpectralDistribution& dist, int d,
                                       Rng& rng) {
    if (d < 1) throw ArgumentError("sample_eigenvalues requires d >= 1");
    std::vector<double> out;
    out.reserve(d);
    switch (dist.kind) {
    case SpectralDistribution::Kind::beta: {
        std::vector<double> lambda, cdf;
        beta_cdf_table(dist.tau, dist.xi, dist.L, lambda, cdf);
        for (int i = 0; i < d; ++i)
            out.push_back(sample_from_table(lambda, cdf, rng.uniform()));
        break;
    }
    case SpectralDistribution::Kind::marchenko_pastur: {
        std::vector<double> lambda, cdf;
        if (dist.r == 1.0)
            beta_cdf_table(0.5, -0.5, 4.0 * dist.sigma2, lambda, cdf);
        else
            mp_cdf_table(dist.r, dist.sigma2, lambda, cdf);
        for (int i = 0; i < d; ++i)
            out.push_back(sample_from_table(lambda, cdf, rng.uniform()));
        break;
    }
    case SpectralDistribution::Kind::gamma:
        for (int i = 0; i < d; ++i) out.push_back(rng.gamma(dist.alpha + 1.0));
        break;
    case SpectralDistribution::Kind::empirical:
        if (static_cast<std::size_t>(d) != dist.eigenvalues.size())
            throw ArgumentError(
                "sample_eigenvalues: d must equal the empirical eigenvalue count");
        out = dist.eigenvalues;
        break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace avgcase
