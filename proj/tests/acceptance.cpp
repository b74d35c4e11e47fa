// Acceptance gate: each invocation checks one numbered criterion and ends
// with a single "criterion N: PASS" or "criterion N: FAIL" line; the exit
// code is 0 only on PASS.  Tolerances are pinned in this file on purpose.
// A red criterion is a finding to investigate, never a knob to loosen.
//
// Usage: acceptance <1..10> [path to the avgcase CLI binary]
// (the CLI path is only needed by criterion 1).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "avgcase/optimizers.hpp"
#include "avgcase/polynomials.hpp"
#include "avgcase/problems.hpp"
#include "avgcase/rates.hpp"
#include "avgcase/rng.hpp"
#include "avgcase/spectra.hpp"
#include "oracles.hpp"

using namespace avgcase;

namespace {

std::string fmt(double v, const char* spec = "%.6g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

// One criterion's accumulator: prints each check as it lands and remembers
// whether everything held.
struct Checker {
    bool ok = true;
    void operator()(bool cond, const std::string& what) {
        std::cout << (cond ? "  ok    " : "  FAIL  ") << what << std::endl;
        ok = ok && cond;
    }
    void info(const std::string& what) {
        std::cout << "  info  " << what << std::endl;
    }
    void note(const std::string& text) {
        std::cout << "        " << text << std::endl;
    }
};

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

// ---------------------------------------------------------------------------
// Criterion 1: the rate-table command reproduces the closed-form exponent
// table exactly (zero tolerance) for the rough-edge and smooth-edge spectral
// families, including the log-factor flag on the critical cell.

struct CliTableRow {
    double exponent = 0.0;
    bool log_factor = false;
};

std::map<std::string, CliTableRow> cli_rate_table(Checker& check,
                                                  const std::string& cli,
                                                  const std::string& xi) {
    std::map<std::string, CliTableRow> table;
    std::string cmd = "'" + cli + "' rates --tau 0.5 --xi " + xi;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) {
        check(false, "launch: " + cmd);
        return table;
    }
    std::string out;
    char buf[4096];
    for (;;) {
        size_t n = fread(buf, 1, sizeof buf, pipe);
        if (n == 0) break;
        out.append(buf, n);
    }
    int status = pclose(pipe);
    check(WIFEXITED(status) && WEXITSTATUS(status) == 0, "exit code 0: " + cmd);

    std::istringstream lines(out);
    std::string line;
    bool header = true;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        if (header) {
            check(line == "method,objective,exponent,log_factor,regime",
                  "header row (xi = " + xi + ")");
            header = false;
            continue;
        }
        auto cells = split_csv(line);
        if (cells.size() != 5) {
            check(false, "malformed row: " + line);
            continue;
        }
        table[cells[0]] = {std::stod(cells[2]), cells[3] == "1"};
        std::cout << "        " << line << std::endl;
    }
    return table;
}

bool criterion_1(const std::string& cli) {
    Checker check;
    if (cli.empty()) {
        check(false, "this criterion needs the CLI binary path as second argument");
        return false;
    }
    auto hi = cli_rate_table(check, cli, "0.5");
    auto lo = cli_rate_table(check, cli, "-0.5");

    struct Want {
        const char* label;
        double exp_hi;
        double exp_lo;
        bool log_lo;
    };
    // Columns: xi = +1/2 (no log factor anywhere) and xi = -1/2 (Nesterov
    // picks up a log factor at its critical decay).
    const Want wants[] = {
        {"gcm_a0.5_b2.5", -5.0, -3.0, false},
        {"gcm_a0.5_b1.5", -4.0, -3.0, false},
        {"nesterov", -4.0, -3.0, true},
        {"gd", -2.5, -1.5, false},
    };
    for (const auto& w : wants) {
        bool have = hi.count(w.label) == 1 && lo.count(w.label) == 1;
        check(have, std::string(w.label) + ": present in both columns");
        if (!have) continue;
        check(hi[w.label].exponent == w.exp_hi && !hi[w.label].log_factor,
              std::string(w.label) + " at xi = +1/2: exactly " + fmt(w.exp_hi) +
                  ", no log factor");
        check(lo[w.label].exponent == w.exp_lo && lo[w.label].log_factor == w.log_lo,
              std::string(w.label) + " at xi = -1/2: exactly " + fmt(w.exp_lo) +
                  (w.log_lo ? ", with log factor" : ", no log factor"));
    }
    return check.ok;
}

// ---------------------------------------------------------------------------
// Criterion 2: quadrature of the expected function gap out to T = 2000
// reproduces every predicted exponent to +-0.1 (+-0.15 on the log-corrected
// Nesterov cell) over the trailing 700-step fit window.

bool criterion_2() {
    Checker check;
    auto beta = SpectralDistribution::beta_dist(0.5, 0.5, 1.0);
    auto mp = SpectralDistribution::marchenko_pastur(1.0, 1.0);

    // Quadrature integrates the limiting spectral law itself, so methods are
    // calibrated at the exact support edge (1 for the Beta family, 4 for the
    // square sample-covariance bulk).
    struct Cell {
        const char* name;
        SpectralDistribution dist;
        Method method;
        double theory;
        bool include_log;
        double tol;
    };
    const Cell cells[] = {
        {"beta(0.5,0.5) gcm(0.5,1.5)", beta, Method::gcm(0.5, 1.5, 1.0), -4.0,
         false, 0.1},
        {"beta(0.5,0.5) gcm(0.5,2.5)", beta, Method::gcm(0.5, 2.5, 1.0), -5.0,
         false, 0.1},
        {"beta(0.5,0.5) nesterov", beta, Method::nesterov(1.0), -4.0, false, 0.1},
        {"beta(0.5,0.5) gd", beta, Method::gd(1.0), -2.5, false, 0.1},
        {"mp(1,1) gcm(0.5,1.5)", mp, Method::gcm(0.5, 1.5, 4.0), -3.0, false, 0.1},
        {"mp(1,1) gcm(0.5,2.5)", mp, Method::gcm(0.5, 2.5, 4.0), -3.0, false, 0.1},
        {"mp(1,1) nesterov", mp, Method::nesterov(4.0), -3.0, true, 0.15},
        {"mp(1,1) gd", mp, Method::gd(4.0), -1.5, false, 0.1},
    };
    for (const auto& c : cells) {
        auto vals = expected_metric(c.dist, c.method, 1, 2000);
        auto fit = fit_slope(vals, 700, c.include_log);
        double delta = fit.slope - c.theory;
        check(std::abs(delta) <= c.tol,
              std::string(c.name) + ": slope " + fmt(fit.slope) + " vs theory " +
                  fmt(c.theory) + " (delta " + fmt(delta) + ", tol " + fmt(c.tol) +
                  (c.include_log ? ", log-corrected fit)" : ")"));
    }
    return check.ok;
}

// ---------------------------------------------------------------------------
// Criterion 3: the log-Gamma closed form of the gradient-descent moment
// integral matches direct adaptive-Simpson quadrature of the Beta-weight
// integral to 1e-10 relative error across exponents, objectives, and times.

bool criterion_3() {
    Checker check;
    const double params[] = {0.5, -0.5, 0.0};
    const int times[] = {1, 10, 100, 1000};
    oracle::Fn one = [](double) { return 1.0; };

    double worst = 0.0;
    std::string worst_at;
    for (double tau : params) {
        for (double xi : params) {
            for (int l = 0; l <= 2; ++l) {
                for (int t : times) {
                    double closed = gd_beta_closed_form(t, tau, xi, l);
                    // Two passes: a rough integral sets the scale, then the
                    // absolute tolerance is tightened to 1e-13 of it so the
                    // oracle is accurate in relative terms even when the
                    // value has decayed to ~1e-12.
                    double rough =
                        oracle::beta_weight_integral(one, 2.0 * t + tau, xi + l,
                                                     1.0, 1e-12);
                    double tol = std::max(1e-300, std::abs(rough) * 1e-13);
                    double fine =
                        oracle::beta_weight_integral(one, 2.0 * t + tau, xi + l,
                                                     1.0, tol);
                    double rel = std::abs(closed - fine) / std::abs(fine);
                    if (rel > worst) {
                        worst = rel;
                        worst_at = "tau " + fmt(tau) + ", xi " + fmt(xi) +
                                   ", l " + std::to_string(l) + ", t " +
                                   std::to_string(t);
                    }
                }
            }
        }
    }
    check.info("108 closed-form values against quadrature; worst relative error " +
               fmt(worst, "%.3g") + " at " + worst_at);
    check(worst <= 1e-10, "worst relative error <= 1e-10");
    return check.ok;
}

// ---------------------------------------------------------------------------
// Criterion 4: the tuned decreasing-step momentum method on the unbounded
// family obeys its binomial closed form, checked through the quadrature
// route: the expected squared distance equals 1 / C(t+alpha+2, t).

bool criterion_4() {
    Checker check;
    for (double a : {0.0, 1.0}) {
        auto vals = expected_metric(SpectralDistribution::gamma_dist(a + 1.0),
                                    Method::laguerre(a + 2.0), 0, 50);
        double worst = 0.0;
        int worst_t = 0;
        for (int t = 0; t <= 50; ++t) {
            double closed = laguerre_closed_form(t, a);
            double rel = std::abs(vals[static_cast<size_t>(t)] - closed) / closed;
            if (rel > worst) {
                worst = rel;
                worst_t = t;
            }
        }
        check(worst <= 1e-8, "alpha = " + fmt(a) +
                                 ": worst relative error " + fmt(worst, "%.3g") +
                                 " (at t = " + std::to_string(worst_t) +
                                 ") <= 1e-8");
    }
    return check.ok;
}

// ---------------------------------------------------------------------------
// Criterion 5: running each optimizer on an instance and evaluating its
// residual polynomials on the instance's spectrum are the same computation:
// every recorded metric matches the polynomial prediction to 1e-9 relative.

bool criterion_5() {
    Checker check;
    auto dist = SpectralDistribution::beta_dist(0.5, -0.5, 1.0);
    Rng rng(205);
    auto p = spectrum_problem(sample_eigenvalues(dist, 30, rng), rng);

    const Method methods[] = {Method::gcm(0.5, 1.5, 1.0), Method::laguerre(2.0),
                              Method::nesterov(1.0), Method::gd(1.0)};
    for (const auto& m : methods) {
        auto traj = run_method(p, m, 50);
        auto table = residual_values(m, 50, p.eigvals);
        double worst = 0.0;
        for (int t = 0; t <= 50; ++t) {
            double f = 0.0, g = 0.0, d2 = 0.0;
            for (int i = 0; i < p.d; ++i) {
                double lam = p.eigvals[static_cast<size_t>(i)];
                double z = p.z0[i];
                double w = table[static_cast<size_t>(t)][static_cast<size_t>(i)];
                double pz2 = w * w * z * z;
                d2 += pz2;
                f += 0.5 * lam * pz2;
                g += lam * lam * pz2;
            }
            auto st = static_cast<size_t>(t);
            worst = std::max(worst, std::abs(traj.fgap[st] - f) /
                                        std::max(std::abs(f), 1e-300));
            worst = std::max(worst, std::abs(traj.gradsq[st] - g) /
                                        std::max(std::abs(g), 1e-300));
            worst = std::max(worst, std::abs(traj.distsq[st] - d2) /
                                        std::max(std::abs(d2), 1e-300));
        }
        check(worst <= 1e-9, m.describe() + ": worst relative gap " +
                                 fmt(worst, "%.3g") + " over t <= 50");
    }
    return check.ok;
}

// ---------------------------------------------------------------------------
// Criterion 6: at d = 4000 a single run already tracks the quadrature
// expectation to within a factor of two for the whole first 200 steps.

bool criterion_6() {
    Checker check;
    auto dist = SpectralDistribution::beta_dist(0.5, -0.5, 1.0);
    Rng rng = Rng::substream(99, 0);
    const int d = 4000;
    auto p = spectrum_problem(sample_eigenvalues(dist, d, rng), rng);

    const Method methods[] = {Method::gcm(0.5, 1.5, 1.0), Method::nesterov(1.0),
                              Method::gd(1.0)};
    for (const auto& m : methods) {
        auto traj = run_method(p, m, 200);
        auto quad = expected_metric(dist, m, 1, 200);
        double lo = 1e300, hi = 0.0;
        for (int t = 0; t <= 200; ++t) {
            auto st = static_cast<size_t>(t);
            double ratio = traj.fgap[st] / (d * quad[st]);
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        check(lo >= 0.5 && hi <= 2.0,
              m.describe() + ": run / (d * expectation) in [" + fmt(lo) + ", " +
                  fmt(hi) + "], required within [0.5, 2]");
    }
    return check.ok;
}

// ---------------------------------------------------------------------------
// Criterion 7: the default benchmark suite (d = 4000, T = 1000, 8 seeds per
// ensemble) lands the mean fitted function-gap slope within +-0.25 of the
// predicted exponent for gradient descent and both momentum tunings on both
// ensembles, and within +-0.3 for Nesterov on the sample-covariance
// ensemble, where the prediction carries a log factor.

struct SuiteCell {
    const char* name;
    double theory;
    bool include_log; // fit with the log log t regressor
    double tol;       // 0 means informational, not gating
    const char* red_note;
};

bool criterion_7() {
    Checker check;
    const int d = 4000, T = 1000, num_seeds = 8;
    const std::uint64_t master = 1234;
    const int window = 700;

    // Calibration: methods on the Beta ensemble use the known support edge
    // L = 1 (draws never exceed it); on the Gram ensemble the bulk edge is 4
    // but single draws overshoot it by the edge fluctuation, so the suite
    // calibrates at 4.08, a hair above every top eigenvalue that the eight
    // seeds produce.  Sitting exactly at a sampled top eigenvalue would put
    // that eigenvalue at the residual polynomials' slow endpoint and
    // contaminate the bulk slope.
    const char* truncation_note =
        "known finite-sample effect: the limiting slope is carried by "
        "eigenvalues of order t^-2, which inside the fit window lie below "
        "the smallest of the d = 4000 draws, so the measured decay is "
        "steeper than the limit; the matching window grows with d.";
    const char* ringing_note =
        "known fit instability: on this oscillating trajectory the log t and "
        "log log t regressors are nearly collinear over the window, so "
        "per-seed log-corrected slopes scatter widely; see the pooled "
        "diagnostic below.";

    struct Suite {
        const char* tag;
        bool gram;
        double L;
        std::vector<SuiteCell> cells; // order: gcm(.5,1.5), gcm(.5,2.5), nesterov, gd
    };
    Suite suites[] = {
        {"beta(0.5,0.5) ensemble", false, 1.0,
         {{"gcm(0.5,1.5)", -4.0, false, 0.25, nullptr},
          {"gcm(0.5,2.5)", -5.0, false, 0.25, truncation_note},
          {"nesterov", -4.0, false, 0.0, nullptr},
          {"gd", -2.5, false, 0.25, truncation_note}}},
        {"gram/mp(1,1) ensemble", true, 4.08,
         {{"gcm(0.5,1.5)", -3.0, false, 0.25, nullptr},
          {"gcm(0.5,2.5)", -3.0, false, 0.25, nullptr},
          {"nesterov (log-corrected)", -3.0, true, 0.3, ringing_note},
          {"gd", -1.5, false, 0.25, nullptr}}},
    };
    auto beta = SpectralDistribution::beta_dist(0.5, 0.5, 1.0);

    for (auto& suite : suites) {
        std::vector<std::vector<double>> slopes(4);
        std::vector<double> pooled_nesterov(static_cast<size_t>(T) + 1, 0.0);
        for (int k = 0; k < num_seeds; ++k) {
            Rng rng = Rng::substream(master, static_cast<std::uint64_t>(k));
            QuadraticProblem p =
                suite.gram
                    ? gram_problem(d, d, 1.0, rng)
                    : spectrum_problem(sample_eigenvalues(beta, d, rng), rng);
            const Method methods[] = {
                Method::gcm(0.5, 1.5, suite.L), Method::gcm(0.5, 2.5, suite.L),
                Method::nesterov(suite.L), Method::gd(suite.L)};
            std::string line = std::string("  info  ") + suite.tag + " seed " +
                               std::to_string(k) + ":";
            for (int m = 0; m < 4; ++m) {
                auto traj = run_method(p, methods[m], T);
                auto fit =
                    fit_slope(traj.fgap, window, suite.cells[static_cast<size_t>(m)].include_log);
                slopes[static_cast<size_t>(m)].push_back(fit.slope);
                line += " " + fmt(fit.slope, "%.3f");
                if (m == 2)
                    for (int t = 0; t <= T; ++t)
                        pooled_nesterov[static_cast<size_t>(t)] +=
                            traj.fgap[static_cast<size_t>(t)] / num_seeds;
            }
            std::cout << line << std::endl;
        }
        for (int m = 0; m < 4; ++m) {
            const auto& cell = suite.cells[static_cast<size_t>(m)];
            double mean = oracle::mean(slopes[static_cast<size_t>(m)]);
            double sd = oracle::sample_sd(slopes[static_cast<size_t>(m)]);
            double delta = mean - cell.theory;
            std::string what = std::string(suite.tag) + " " + cell.name +
                               ": mean slope " + fmt(mean) + " (sd " + fmt(sd) +
                               ") vs theory " + fmt(cell.theory) + ", delta " +
                               fmt(delta);
            if (cell.tol == 0.0) {
                check.info(what + " [informational, not gated]");
                continue;
            }
            bool pass = std::abs(delta) <= cell.tol;
            check(pass, what + ", tol " + fmt(cell.tol));
            if (!pass && cell.red_note != nullptr) check.note(cell.red_note);
        }
        if (suite.gram) {
            // Pooled diagnostic for the Nesterov cell: the mean trajectory
            // across seeds is smooth enough for a stable fit; its plain
            // slope sitting above the log-corrected one by roughly
            // 1/log(t_mid) is the signature of a t^-3 log t decay.
            auto plain = fit_slope(pooled_nesterov, window, false);
            auto logged = fit_slope(pooled_nesterov, window, true);
            check.info("pooled nesterov mean trajectory: plain slope " +
                       fmt(plain.slope) + ", log-corrected slope " +
                       fmt(logged.slope));
        }
    }
    return check.ok;
}

// ---------------------------------------------------------------------------
// Criterion 8: on the 100 x 100 tuning grid no (alpha, beta) beats the
// optimal-tuning exponent for either spectral family, and for the
// sample-covariance family the best grid cell is (0.5, 1.5) at exactly -3.

bool criterion_8() {
    Checker check;
    for (double xi : {0.5, -0.5}) {
        double opt = optimal_exponent(xi, 1).rate.exponent;
        double best = 0.0;
        int violations = 0;
        double star = 0.0;
        bool star_log = true;
        for (int i = 1; i <= 100; ++i) {
            for (int j = 1; j <= 100; ++j) {
                double a = (5.0 * i - 100.0) / 100.0;
                double b = (5.0 * j - 100.0) / 100.0;
                auto r = gcm_avg_exponent(a, b, 0.5, xi, 1);
                if (r.exponent < opt - 1e-12) ++violations;
                best = std::min(best, r.exponent);
                if (a == 0.5 && b == 1.5) {
                    star = r.exponent;
                    star_log = r.log_factor;
                }
            }
        }
        check(violations == 0, "xi = " + fmt(xi) + ": no grid cell below the optimum " +
                                   fmt(opt) + " (violations: " +
                                   std::to_string(violations) + ")");
        if (xi == -0.5) {
            check(best == -3.0, "xi = -0.5: best grid exponent is exactly -3 (got " +
                                    fmt(best) + ")");
            check(star == -3.0 && !star_log,
                  "xi = -0.5: cell (0.5, 1.5) attains -3 with no log factor");
        }
    }
    return check.ok;
}

// ---------------------------------------------------------------------------
// Criterion 9: overestimating the calibration scale by 50% on the
// sample-covariance benchmark moves the fitted slope by at most 0.3.

bool criterion_9() {
    Checker check;
    Rng rng = Rng::substream(1234, 0);
    auto p = gram_problem(4000, 4000, 1.0, rng);
    check.info("instance top eigenvalue " + fmt(p.L_instance) +
               "; calibrations 4.08 and 6.12 both sit above it");
    auto exact = run_gcm(p, 0.5, 1.5, 4.08, 1000);
    auto loose = run_gcm(p, 0.5, 1.5, 6.12, 1000);
    double s1 = fit_slope(exact.fgap, 700).slope;
    double s2 = fit_slope(loose.fgap, 700).slope;
    check(std::abs(s1 - s2) <= 0.3, "slope " + fmt(s1) + " at scale 4.08 vs " +
                                        fmt(s2) + " at scale 6.12; |delta| " +
                                        fmt(std::abs(s1 - s2)) + " <= 0.3");
    return check.ok;
}

// ---------------------------------------------------------------------------
// Criterion 10: worst-case envelopes of the momentum method decay at their
// predicted uniform rates: t^-2 for the (0.5, 1.5) tuning's function gap and
// t^-4 for the (0.5, 2.5) tuning's squared gradient.

bool criterion_10() {
    Checker check;
    auto w1 = worst_case_metric(Method::gcm(0.5, 1.5, 1.0), 1, 1000, 1.0);
    auto f1 = fit_slope(w1, 700);
    check(std::abs(f1.slope + 2.0) <= 0.2,
          "gcm(0.5,1.5) worst-case gap slope " + fmt(f1.slope) + " within -2 +- 0.2");
    auto w2 = worst_case_metric(Method::gcm(0.5, 2.5, 1.0), 2, 1000, 1.0);
    auto f2 = fit_slope(w2, 700);
    check(std::abs(f2.slope + 4.0) <= 0.2,
          "gcm(0.5,2.5) worst-case gradient slope " + fmt(f2.slope) +
              " within -4 +- 0.2");
    return check.ok;
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: acceptance <criterion 1..10> [cli path]" << std::endl;
        return 2;
    }
    int n = std::atoi(argv[1]);
    if (n < 1 || n > 10) {
        std::cerr << "unknown criterion: " << argv[1] << std::endl;
        return 2;
    }
    std::string cli = argc > 2 ? argv[2] : "";
    std::cout << "criterion " << n << ": checking..." << std::endl;
    bool ok = false;
    try {
        switch (n) {
            case 1: ok = criterion_1(cli); break;
            case 2: ok = criterion_2(); break;
            case 3: ok = criterion_3(); break;
            case 4: ok = criterion_4(); break;
            case 5: ok = criterion_5(); break;
            case 6: ok = criterion_6(); break;
            case 7: ok = criterion_7(); break;
            case 8: ok = criterion_8(); break;
            case 9: ok = criterion_9(); break;
            case 10: ok = criterion_10(); break;
        }
    } catch (const std::exception& e) {
        std::cout << "  FAIL  unexpected exception: " << e.what() << std::endl;
        ok = false;
    }
    std::cout << "criterion " << n << ": " << (ok ? "PASS" : "FAIL") << std::endl;
    return ok ? 0 : 1;
}
