#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "avgcase/errors.hpp"
#include "avgcase/rates.hpp"
#include "oracles.hpp"

using avgcase::ArgumentError;
using avgcase::fit_slope;
using avgcase::gcm_avg_exponent;
using avgcase::gcm_worst_exponent;
using avgcase::gd_avg_exponent;
using avgcase::gd_beta_closed_form;
using avgcase::laguerre_closed_form;
using avgcase::laguerre_exponent;
using avgcase::nesterov_avg_exponent;
using avgcase::optimal_exponent;
using avgcase::RateSpec;

namespace {

// The 100-point parameter lattice (-1, 4] used by the grid properties;
// entries are multiples of 1/20, well inside the rational-snap radius.
std::vector<double> param_grid() {
    std::vector<double> g;
    for (int i = 1; i <= 100; ++i) g.push_back((5.0 * i - 100.0) / 100.0);
    return g;
}

} // namespace

TEST_CASE("momentum-method average exponents hit the published table") {
    auto r1 = gcm_avg_exponent(0.5, 2.5, 0.5, 0.5, 1);
    CHECK(r1.exponent == -5.0);
    CHECK_FALSE(r1.log_factor);
    auto r2 = gcm_avg_exponent(0.5, 2.5, 0.5, -0.5, 1);
    CHECK(r2.exponent == -3.0);
    CHECK_FALSE(r2.log_factor);
    auto r3 = gcm_avg_exponent(0.5, 1.5, 0.5, 0.5, 1);
    CHECK(r3.exponent == -4.0);
    CHECK(r3.regime == "sub-critical");
    CHECK_FALSE(r1.constant_known);
}

TEST_CASE("double equality hits the logarithmic branch") {
    auto r = gcm_avg_exponent(1.0, 1.0, 0.5, -0.5, 1);
    CHECK(r.exponent == -3.0);
    CHECK(r.log_factor);
    CHECK(r.regime == "critical");
}

TEST_CASE("single equality routes to the generic branch without a log") {
    // alpha sits exactly on its threshold but beta does not.
    auto r = gcm_avg_exponent(1.0, 1.5, 0.5, 0.5, 1);
    CHECK(r.exponent == -4.0);
    CHECK_FALSE(r.log_factor);
    CHECK(r.regime == "post-critical");
}

TEST_CASE("non-rational parameters flag the tolerance comparison") {
    const double irr = 0.5 + 1.4142135623730951e-7;
    auto r = gcm_avg_exponent(irr, 1.3, 0.5, 0.5, 1);
    CHECK(r.exponent == doctest::Approx(-3.6).epsilon(1e-12));
    REQUIRE(!r.regime.empty());
    CHECK(r.regime.back() == '~');

    // Tolerance-equality on both thresholds lands on the log branch.
    const double tau = 0.5 + 1.4142135623730951e-7;
    auto c = gcm_avg_exponent(tau + 0.5, 1.0, tau, -0.5, 1);
    CHECK(c.log_factor);
    CHECK(c.exponent == doctest::Approx(-3.0).epsilon(1e-12));
    CHECK(c.regime == "critical~");
}

TEST_CASE("best tuning exponent and parameter") {
    auto o = optimal_exponent(-0.5, 1);
    CHECK(o.rate.exponent == -3.0);
    CHECK(o.beta_star == 1.5);
    CHECK_FALSE(o.rate.log_factor);

    // Limit toward the left-edge-degenerate family approaches the
    // worst-case envelope exponent.
    auto lim = optimal_exponent(-1.0 + 1e-9, 1);
    CHECK(lim.rate.exponent == doctest::Approx(-2.0).epsilon(1e-8));

    auto g = optimal_exponent(0.5, 2);
    CHECK(g.rate.exponent == -7.0);
    CHECK(g.beta_star == 3.5);
}

TEST_CASE("worst-case branch evaluation") {
    auto a = gcm_worst_exponent(0.5, 1.5, 1);
    CHECK(a.exponent == -2.0);
    CHECK(a.regime == "plateau");
    auto b = gcm_worst_exponent(0.0, 0.0, 1);
    CHECK(b.exponent == 0.0);
    CHECK(b.regime == "right-edge");
    auto c = gcm_worst_exponent(0.5, 2.5, 2);
    CHECK(c.exponent == -4.0);
    CHECK(c.regime == "plateau");
    // Left-edge branch needs the right edge dominated (alpha <= beta - l)
    // and a light left weight (beta <= l - 1/2).
    auto d = gcm_worst_exponent(-0.8, 0.25, 1);
    CHECK(d.exponent == -1.5);
    CHECK(d.regime == "left-edge");
    // With a heavy right-edge exponent the envelope grows.
    auto e = gcm_worst_exponent(0.5, 0.25, 2);
    CHECK(e.exponent == 0.5);
    CHECK(e.regime == "right-edge");
}

TEST_CASE("accelerated-baseline average exponents") {
    auto a = nesterov_avg_exponent(-0.5, 1);
    CHECK(a.exponent == -3.0);
    CHECK(a.log_factor);
    auto b = nesterov_avg_exponent(0.5, 1);
    CHECK(b.exponent == -4.0);
    CHECK_FALSE(b.log_factor);
    auto c = nesterov_avg_exponent(0.0, 2);
    CHECK(c.exponent == -4.5);
    auto d = nesterov_avg_exponent(-0.75, 1);
    CHECK(d.exponent == doctest::Approx(-2.5).epsilon(1e-12));
    CHECK(d.regime == "accelerated");
}

TEST_CASE("fixed-step baseline average exponents") {
    CHECK(gd_avg_exponent(-0.5, 1).exponent == -1.5);
    CHECK(gd_avg_exponent(0.5, 1).exponent == -2.5);
    CHECK(gd_avg_exponent(-1.0 + 1e-9, 1).exponent ==
          doctest::Approx(-1.0).epsilon(1e-8));
    CHECK(gd_avg_exponent(0.5, 2).exponent == -3.5);
}

TEST_CASE("decreasing-step method exponent") {
    CHECK(laguerre_exponent(0.0).exponent == -2.0);
    CHECK(laguerre_exponent(-0.5).exponent == -1.5);
    CHECK(laguerre_exponent(-1.0 + 1e-9).exponent ==
          doctest::Approx(-1.0).epsilon(1e-8));
}

TEST_CASE("fixed-step moment integral closed form") {
    CHECK(gd_beta_closed_form(0, 0.0, 0.0, 0) == doctest::Approx(1.0).epsilon(1e-14));

    // Independent quadrature of (1-x)^(2t+tau) x^(l+xi) on [0,1].
    double want = oracle::beta_weight_integral([](double) { return 1.0; },
                                               200.5, 0.5, 1.0, 1e-15);
    double got = gd_beta_closed_form(100, 0.5, -0.5, 1);
    CHECK(got == doctest::Approx(want).epsilon(1e-10));

    // Doubling t scales the value by 2^-(xi+l+1) asymptotically.
    double ratio = gd_beta_closed_form(8000, 0.5, -0.5, 1) /
                   gd_beta_closed_form(4000, 0.5, -0.5, 1);
    CHECK(ratio == doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-3));
}

TEST_CASE("decreasing-step metric closed form") {
    CHECK(laguerre_closed_form(0, 1.7) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(laguerre_closed_form(3, 0.0) == doctest::Approx(0.1).epsilon(1e-14));
    double ratio = laguerre_closed_form(8000, 0.5) / laguerre_closed_form(4000, 0.5);
    CHECK(ratio == doctest::Approx(std::pow(2.0, -2.5)).epsilon(1e-3));
}

TEST_CASE("slope fit recovers exact power laws") {
    std::vector<double> vals(1500);
    vals[0] = 1.0;
    for (int t = 1; t < 1500; ++t) vals[t] = 7.0 * std::pow(t, -3.0);
    auto fit = fit_slope(vals, 700);
    CHECK(fit.slope == doctest::Approx(-3.0).epsilon(1e-10));
    CHECK(fit.std_error <= 1e-8);
    CHECK(fit.window_first == 800);
    CHECK(fit.window_last == 1499);
    CHECK_FALSE(fit.log_corrected);
    CHECK_FALSE(fit.shrunk);
}

TEST_CASE("slope fit absorbs a log factor when asked") {
    std::vector<double> vals(1500);
    vals[0] = vals[1] = 1.0;
    for (int t = 2; t < 1500; ++t)
        vals[t] = 3.0 * std::pow(t, -3.0) * std::log(t);
    auto fit = fit_slope(vals, 700, true);
    CHECK(fit.slope == doctest::Approx(-3.0).epsilon(1e-8));
    CHECK(fit.log_corrected);

    // Without the extra regressor the same data reads shallower.
    auto plain = fit_slope(vals, 700);
    CHECK(plain.slope > -3.0);
    CHECK(plain.slope < -2.7);
}

TEST_CASE("slope fit on the fixed-step closed-form trajectory") {
    std::vector<double> vals(2001);
    vals[0] = 1.0;
    for (int t = 1; t <= 2000; ++t) vals[t] = gd_beta_closed_form(t, 0.5, -0.5, 1);
    auto fit = fit_slope(vals, 700);
    CHECK(fit.window_first == 1301);
    CHECK(fit.window_last == 2000);
    CHECK(fit.slope == doctest::Approx(-1.5).epsilon(0.05 / 1.5));
}

TEST_CASE("short trajectories shrink the fit window") {
    std::vector<double> vals(300);
    vals[0] = 1.0;
    for (int t = 1; t < 300; ++t) vals[t] = std::pow(t, -2.0);
    auto fit = fit_slope(vals, 700);
    CHECK(fit.shrunk);
    CHECK(fit.window_first == 150);
    CHECK(fit.window_last == 299);
    CHECK(fit.slope == doctest::Approx(-2.0).epsilon(1e-9));
}

TEST_CASE("slope fit rejects bad inputs") {
    std::vector<double> vals(1000, 1.0);
    vals[900] = 0.0;
    CHECK_THROWS_AS(fit_slope(vals, 700), ArgumentError);
    vals[900] = -1.0;
    CHECK_THROWS_AS(fit_slope(vals, 700), ArgumentError);
    CHECK_THROWS_AS(fit_slope(vals, 1), ArgumentError);
    std::vector<double> tiny = {1.0, 1.0, 1.0};
    CHECK_THROWS_AS(fit_slope(tiny, 700), ArgumentError);
}

TEST_CASE("rate functions reject out-of-domain parameters") {
    CHECK_THROWS_AS(gcm_avg_exponent(-1.0, 0.5, 0.5, 0.5, 1), ArgumentError);
    CHECK_THROWS_AS(gcm_avg_exponent(0.5, -1.5, 0.5, 0.5, 1), ArgumentError);
    CHECK_THROWS_AS(gcm_avg_exponent(0.5, 0.5, 0.5, 0.5, 0), ArgumentError);
    CHECK_THROWS_AS(gcm_avg_exponent(0.5, 0.5, 0.5, 0.5, 3), ArgumentError);
    CHECK_THROWS_AS(optimal_exponent(-1.0, 1), ArgumentError);
    CHECK_THROWS_AS(nesterov_avg_exponent(-2.0, 1), ArgumentError);
    CHECK_THROWS_AS(gd_avg_exponent(-1.0, 1), ArgumentError);
    CHECK_THROWS_AS(laguerre_exponent(-1.0), ArgumentError);
    CHECK_THROWS_AS(gd_beta_closed_form(-1, 0.5, 0.5, 1), ArgumentError);
    CHECK_THROWS_AS(laguerre_closed_form(-1, 0.5), ArgumentError);
}

TEST_CASE("branch surface is total and continuous on the lattice") {
    auto grid = param_grid();
    for (double xi : {-0.5, 0.5}) {
        const double tau = 0.5;
        for (int l = 1; l <= 2; ++l) {
            std::vector<std::vector<double>> e(grid.size(),
                                               std::vector<double>(grid.size()));
            for (std::size_t i = 0; i < grid.size(); ++i)
                for (std::size_t j = 0; j < grid.size(); ++j) {
                    auto r = gcm_avg_exponent(grid[i], grid[j], tau, xi, l);
                    REQUIRE(std::isfinite(r.exponent));
                    bool known = r.regime == "sub-critical" ||
                                 r.regime == "critical" ||
                                 r.regime == "post-critical";
                    REQUIRE(known);
                    e[i][j] = r.exponent;
                }
            // Both branch families are 2-Lipschitz in each parameter and
            // agree on their shared boundaries, so one lattice step of
            // 0.05 moves the exponent by at most 0.1.
            for (std::size_t i = 0; i < grid.size(); ++i)
                for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
                    CHECK(std::fabs(e[i][j + 1] - e[i][j]) <= 0.1 + 1e-9);
                    CHECK(std::fabs(e[j + 1][i] - e[j][i]) <= 0.1 + 1e-9);
                }
        }
    }
}

TEST_CASE("no tuning on the lattice beats the optimum") {
    auto grid = param_grid();
    for (double xi : {-0.5, 0.5}) {
        for (int l = 1; l <= 2; ++l) {
            double opt = optimal_exponent(xi, l).rate.exponent;
            double best = 0.0;
            for (double a : grid)
                for (double b : grid) {
                    double e = gcm_avg_exponent(a, b, 0.5, xi, l).exponent;
                    CHECK(e >= opt - 1e-12);
                    if (e < best) best = e;
                }
            // The bound is attained on the lattice at (tau, xi+l+1).
            CHECK(best == opt);
            double at_star =
                gcm_avg_exponent(0.5, xi + l + 1.0, 0.5, xi, l).exponent;
            CHECK(at_star == opt);
        }
    }
}

TEST_CASE("accelerated baseline trails the optimum by the known gap") {
    for (double xi : {-0.9, -0.75, -0.6, -0.4, 0.0, 0.3, 0.5, 1.0, 2.0}) {
        double gap = nesterov_avg_exponent(xi, 1).exponent -
                     optimal_exponent(xi, 1).rate.exponent;
        CHECK(gap == doctest::Approx(std::max(0.0, xi + 0.5)).epsilon(1e-12));
    }
}
