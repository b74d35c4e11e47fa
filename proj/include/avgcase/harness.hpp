#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "avgcase/polynomials.hpp"
#include "avgcase/rates.hpp"
#include "avgcase/spectra.hpp"

namespace avgcase {

inline constexpr const char* kToolVersion = "0.1.0";

/// How problem instances are built: "spectrum" samples d eigenvalues from
/// the configured distribution and conjugates by a Haar-random orthogonal
/// matrix; "gram" forms X X^T from an i.i.d. Gaussian d-by-n data matrix
/// with n >= d (its spectral law is the Marchenko-Pastur bulk with ratio
/// d/n and scale sigma2 * n/d; at n = d, the generator's own parameters).
struct GeneratorSpec {
    enum class Kind { spectrum, gram };
    Kind kind = Kind::spectrum;
    int d = 1;
    int n = 1;           // gram only
    double sigma2 = 1.0; // gram only

    std::string describe() const;
};

struct FitOptions {
    int window = 700;
    bool include_log = false;
};

/// One requested method. L is the smoothness scale: when has_L is false it
/// is resolved per problem instance to the largest observed eigenvalue
/// (simulation) or to the distribution edge (quadrature).
struct MethodEntry {
    Method::Kind kind = Method::Kind::gd;
    double alpha = 0.0;
    double beta = 0.0;
    double L = 0.0;
    bool has_L = false;

    Method resolve(double instance_L) const;
    /// Filesystem-safe tag such as "gcm_a0.5_b2.5", used in file names,
    /// manifests, and rate tables.
    std::string label() const;
};

struct ExperimentConfig {
    SpectralDistribution distribution =
        SpectralDistribution::beta_dist(0.5, 0.5, 1.0);
    GeneratorSpec generator;
    std::vector<MethodEntry> methods;
    int T = 1000;
    std::uint64_t master_seed = 1234;
    std::vector<std::uint64_t> seeds; // substream indices under master_seed
    std::string out_dir = "out";
    int workers = 1;
    FitOptions fit;
};

/// Strict parse of the JSON experiment config: unknown keys, wrong types,
/// missing required fields, and inconsistent combinations (e.g. a gram
/// generator whose r = n/d disagrees with the declared distribution) all
/// raise ConfigError. See README.md for the schema.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

/// 64-bit FNV-1a hash (hex) of the canonicalized experiment-defining
/// fields; invariant under config reformatting and under out_dir/workers
/// changes, which do not affect results.
std::string config_hash(const ExperimentConfig& config);

/// Theoretical asymptotic rate of `method` on `dist` for objective_l in
/// {1, 2}, when the theory covers that combination (known = false
/// otherwise: empirical spectra, untuned Laguerre, gamma spectra for the
/// bounded-support methods).
struct TheoryRate {
    bool known = false;
    RateSpec rate;
};
TheoryRate theory_rate(const SpectralDistribution& dist,
                       const MethodEntry& method, int objective_l);

/// Run the full simulation suite: per (seed, method), build the problem,
/// run T steps, write a trajectory CSV, and fit slopes; then write
/// per-method aggregate CSVs (geometric mean and log-sd across seeds) and
/// a manifest JSON into out_dir. Diverging or erroring runs are recorded
/// in the manifest without aborting siblings. Returns 0, or 2 when any
/// run diverged or errored.
int cmd_run(const ExperimentConfig& config, std::ostream& log);

/// Emit the exact expected-metric trajectory (all three objectives) of
/// `method` under `dist` as a trajectory CSV, and log a fitted slope of
/// the objective_l column. Returns 0, or 2 when the selected metric
/// diverged and no slope exists.
int cmd_quadrature(const SpectralDistribution& dist, const Method& method,
                   int T, int objective_l, const FitOptions& fit,
                   std::ostream& csv_out, std::ostream& log);

/// Print the theoretical rate table (CSV: method, objective, exponent,
/// log_factor, regime) for the given edge exponents.
int cmd_rates(double tau, double xi, const std::vector<MethodEntry>& methods,
              int objective_l, std::ostream& out);

/// Sweep the shifted-Jacobi parameters over the 100x100 lattice
/// (-1, 4]^2 in steps of 0.05 and emit per-cell exponent and convergence
/// flag (CSV: alpha, beta, exponent, log_factor, converges).
int cmd_rates_grid(double tau, double xi, int objective_l, std::ostream& out);

/// Join a run manifest's mean fitted slopes with the stored theoretical
/// exponents for one metric ("fgap" or "gradsq") and report per-method
/// deltas. Returns 0 when every compared method is within tol (or there
/// was nothing to compare), 3 otherwise.
int cmd_compare(const std::string& manifest_path, double tol,
                const std::string& metric, std::ostream& out);

/// Parse a CLI method spec: "gcm:<alpha>,<beta>", "laguerre:<alpha>",
/// "nesterov", "gd", each optionally followed by "@<L>" to pin the
/// smoothness scale.
MethodEntry parse_method_spec(const std::string& text);

} // namespace avgcase
