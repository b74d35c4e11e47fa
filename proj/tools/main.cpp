#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "avgcase/errors.hpp"
#include "avgcase/harness.hpp"

namespace {

avgcase::SpectralDistribution build_distribution(const std::string& name,
                                                 double tau, double xi,
                                                 double edge, double r,
                                                 double sigma2, double alpha) {
    using avgcase::SpectralDistribution;
    if (name == "beta") return SpectralDistribution::beta_dist(tau, xi, edge);
    if (name == "marchenko_pastur" || name == "mp") {
        return SpectralDistribution::marchenko_pastur(r, sigma2);
    }
    if (name == "gamma") return SpectralDistribution::gamma_dist(alpha);
    throw avgcase::ArgumentError("--dist must be beta, marchenko_pastur, or gamma");
}

} // namespace

int main(int argc, char** argv) {
    using namespace avgcase;
    CLI::App app{"Average-case rates of first-order methods on random quadratics"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand(
        "run", "Execute a simulation suite described by a JSON config");
    std::string config_path;
    run->add_option("--config", config_path, "experiment config file")
        ->required();

    auto* quad = app.add_subcommand(
        "quadrature",
        "Exact expected-metric trajectory of a method under a distribution");
    std::string dist_name = "beta";
    double tau = 0.5, xi = 0.5, edge = 1.0, aspect = 1.0, sigma2 = 1.0;
    double dist_alpha = 0.0;
    quad->add_option("--dist", dist_name, "beta | marchenko_pastur | gamma")
        ->capture_default_str();
    quad->add_option("--tau", tau, "right-edge exponent (beta)")
        ->capture_default_str();
    quad->add_option("--xi", xi, "left-edge exponent (beta)")
        ->capture_default_str();
    quad->add_option("--L", edge, "support edge (beta)")->capture_default_str();
    quad->add_option("--r", aspect, "aspect ratio (marchenko_pastur)")
        ->capture_default_str();
    quad->add_option("--sigma2", sigma2, "scale (marchenko_pastur)")
        ->capture_default_str();
    quad->add_option("--dist-alpha", dist_alpha, "shape (gamma)")
        ->capture_default_str();
    std::string method_spec = "gd";
    quad->add_option(
            "--method", method_spec,
            "gcm:<alpha>,<beta> | laguerre:<alpha> | nesterov | gd, each "
            "optionally followed by @<L> to pin the smoothness scale "
            "(default: the distribution edge)")
        ->capture_default_str();
    int T = 2000, objective = 1, window = 700;
    bool include_log = false;
    quad->add_option("-T,--iterations", T, "iteration count")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    quad->add_option("-l,--objective", objective,
                     "metric to slope-fit: 0 distsq, 1 fgap, 2 gradsq")
        ->capture_default_str()
        ->check(CLI::Range(0, 2));
    quad->add_option("--window", window, "slope-fit window length")
        ->capture_default_str();
    quad->add_flag("--include-log", include_log,
                   "add a free log log t regressor to the slope fit");
    std::string quad_out;
    quad->add_option("-o,--out", quad_out, "CSV output file (default stdout)");

    auto* rates = app.add_subcommand(
        "rates", "Theoretical asymptotic exponents for edge exponents (tau, xi)");
    double r_tau = 0.5, r_xi = 0.5;
    rates->add_option("--tau", r_tau, "right-edge exponent")->required();
    rates->add_option("--xi", r_xi, "left-edge exponent")->required();
    int r_objective = 1;
    rates
        ->add_option("-l,--objective", r_objective,
                     "objective: 1 fgap, 2 gradsq")
        ->capture_default_str()
        ->check(CLI::Range(1, 2));
    std::vector<std::string> method_specs;
    rates->add_option("--method", method_specs,
                      "method spec (repeatable); default: the four-row table "
                      "gcm:0.5,2.5 gcm:0.5,1.5 nesterov gd");
    bool grid = false;
    rates->add_flag("--grid", grid,
                    "sweep (alpha, beta) over the 100x100 lattice (-1, 4]^2 "
                    "and emit per-cell exponents");
    std::string rates_out;
    rates->add_option("-o,--out", rates_out, "CSV output file (default stdout)");

    auto* cmp = app.add_subcommand(
        "compare", "Join a run manifest's fitted slopes with stored theory");
    std::string manifest_path, metric = "fgap";
    double tol = 0.25;
    cmp->add_option("--manifest", manifest_path, "manifest.json from `run`")
        ->required();
    cmp->add_option("--tol", tol, "pass/fail tolerance on the slope delta")
        ->capture_default_str();
    cmp->add_option("--metric", metric, "fgap | gradsq | distsq")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*run) {
            return cmd_run(load_config(config_path), std::cout);
        }
        if (*quad) {
            SpectralDistribution dist = build_distribution(
                dist_name, tau, xi, edge, aspect, sigma2, dist_alpha);
            MethodEntry entry = parse_method_spec(method_spec);
            double hi = support(dist).second;
            if (!entry.has_L && !std::isfinite(hi) &&
                entry.kind != Method::Kind::laguerre) {
                throw ArgumentError(
                    "the distribution has unbounded support; pin the method's "
                    "smoothness scale with @<L>, e.g. gcm:0.5,2.5@8");
            }
            Method method = entry.resolve(hi);
            FitOptions fit{window, include_log};
            if (quad_out.empty()) {
                return cmd_quadrature(dist, method, T, objective, fit, std::cout,
                                      std::cerr);
            }
            std::ofstream f(quad_out);
            if (!f) throw IoError("cannot write " + quad_out);
            return cmd_quadrature(dist, method, T, objective, fit, f, std::cout);
        }
        if (*rates) {
            std::ostream* out = &std::cout;
            std::ofstream f;
            if (!rates_out.empty()) {
                f.open(rates_out);
                if (!f) throw IoError("cannot write " + rates_out);
                out = &f;
            }
            if (grid) return cmd_rates_grid(r_tau, r_xi, r_objective, *out);
            std::vector<MethodEntry> methods;
            if (method_specs.empty()) {
                method_specs = {"gcm:0.5,2.5", "gcm:0.5,1.5", "nesterov", "gd"};
            }
            for (const std::string& s : method_specs) {
                methods.push_back(parse_method_spec(s));
            }
            return cmd_rates(r_tau, r_xi, methods, r_objective, *out);
        }
        if (*cmp) {
            return cmd_compare(manifest_path, tol, metric, std::cout);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const ArgumentError& e) {
        std::cerr << "argument error: " << e.what() << "\n";
        return 1;
    } catch (const UnsupportedError& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
