#include "avgcase/special.hpp"

#include <cmath>

#include "avgcase/errors.hpp"

namespace avgcase {

double log_beta(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw ArgumentError("log_beta requires a > 0 and b > 0");
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

namespace {

// Continued fraction for the incomplete beta, valid (fast) when
// x < (a + 1) / (a + b + 2).  Modified Lentz with the usual tiny-guard.
double beta_cf(double x, double a, double b) {
    const double tiny = 1e-300;
    const double eps = 1e-16;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 400; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) return h;
    }
    return h;
}

} // namespace

double reg_inc_beta(double x, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw ArgumentError("reg_inc_beta requires a > 0 and b > 0");
    if (!(x >= 0.0 && x <= 1.0))
        throw ArgumentError("reg_inc_beta requires x in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    double lfront = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
    if (x < (a + 1.0) / (a + b + 2.0))
        return std::exp(lfront) * beta_cf(x, a, b) / a;
    return 1.0 - std::exp(b * std::log1p(-x) + a * std::log(x) - log_beta(b, a)) *
                     beta_cf(1.0 - x, b, a) / b;
}

double binomial(double n, int k) {
    if (k < 0) throw ArgumentError("binomial requires k >= 0");
    if (!(n > -1.0)) throw ArgumentError("binomial requires n > -1");
    if (k == 0) return 1.0;
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
                    std::lgamma(n - k + 1.0));
}

} // namespace avgcase
