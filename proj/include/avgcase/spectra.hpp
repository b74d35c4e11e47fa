#pragma once

#include <string>
#include <utility>
#include <vector>

#include "avgcase/rng.hpp"

namespace avgcase {

/// A model for the expected spectral distribution of a random quadratic
/// problem.  Instances are immutable after construction and safe to share
/// across threads; samplers take an explicit caller-owned random stream.
struct SpectralDistribution {
    enum class Kind { beta, marchenko_pastur, gamma, empirical };

    Kind kind;
    // beta: density proportional to lambda^xi (L - lambda)^tau on [0, L],
    // normalized by L^(tau+xi+1) * B(xi+1, tau+1).
    double tau = 0.0, xi = 0.0, L = 1.0;
    // marchenko_pastur: bulk law on [edge_lo, edge_hi] with
    // edge_hi = sigma2 (1+sqrt(r))^2, edge_lo = sigma2 (1-sqrt(r))^2,
    // density (2 pi sigma2 r lambda)^-1 sqrt((edge_hi-lambda)(lambda-edge_lo)),
    // total mass 1; restricted to 0 < r <= 1.
    double r = 1.0, sigma2 = 1.0;
    // gamma: density lambda^alpha exp(-lambda) / Gamma(alpha+1) on [0, inf).
    double alpha = 0.0;
    // empirical: sorted nonnegative eigenvalues, mass 1/d each.
    std::vector<double> eigenvalues;

    static SpectralDistribution beta_dist(double tau, double xi, double L);
    static SpectralDistribution marchenko_pastur(double r, double sigma2);
    static SpectralDistribution gamma_dist(double alpha);
    static SpectralDistribution empirical(std::vector<double> eigenvalues);
    /// Plain-text loader: one nonnegative eigenvalue per line, `#` comments
    /// and blank lines ignored.
    static SpectralDistribution empirical_from_file(const std::string& path);

    /// Short tag such as "beta(0.5,0.5,1)" used in manifests and CSV headers.
    std::string describe() const;
};

/// Normalized probability density at lambda; zero outside the support.
/// The empirical variant does not support this operation.
double density(const SpectralDistribution& dist, double lambda);

/// Support endpoints; the upper end is +infinity for the gamma variant.
std::pair<double, double> support(const SpectralDistribution& dist);

/// Mean of the distribution (used by trace sanity checks).
double dist_mean(const SpectralDistribution& dist);

/// d i.i.d. draws for the density-bearing variants; the empirical variant
/// returns its stored list and requires d to equal its length.
std::vector<double> sample_eigenvalues(const SpectralDistribution& dist, int d,
                                       Rng& rng);

} // namespace avgcase
