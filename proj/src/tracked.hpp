#pragma once

#include <algorithm>
#include <cmath>

// Mantissa/exponent-separated arithmetic for recurrences whose values leave
// double range (Laguerre-type evaluations scaled by e^{-x/2}).

namespace avgcase::detail {

// value = frac * 2^exp2 with |frac| in [1, 2), or exactly 0.
struct Tracked {
    double frac;
    long exp2;
};

inline Tracked tracked_normalize(double v, long e) {
    if (v == 0.0) return {0.0, 0};
    int de;
    double f = std::frexp(v, &de); // |f| in [0.5, 1)
    return {f * 2.0, e + de - 1};
}

// e^{-x/2} for x >= 0, exactly representable at any magnitude.
inline Tracked tracked_half_exp(double x) {
    double l2 = -x * 0.72134752044448170368; // log2 e / 2
    long e = static_cast<long>(std::floor(l2));
    return {std::exp2(l2 - static_cast<double>(e)), e};
}

// c1 * a + c2 * b, aligned to the larger exponent.
inline Tracked tracked_combine(double c1, const Tracked& a, double c2,
                               const Tracked& b) {
    if (a.frac == 0.0) return tracked_normalize(c2 * b.frac, b.exp2);
    if (b.frac == 0.0) return tracked_normalize(c1 * a.frac, a.exp2);
    long emax = std::max(a.exp2, b.exp2);
    long da = a.exp2 - emax, db = b.exp2 - emax;
    double fa = da < -4096 ? 0.0 : std::ldexp(a.frac, static_cast<int>(da));
    double fb = db < -4096 ? 0.0 : std::ldexp(b.frac, static_cast<int>(db));
    return tracked_normalize(c1 * fa + c2 * fb, emax);
}

// t^2 collapsed to a plain double (0 on underflow, inf on overflow).
inline double tracked_square_value(const Tracked& t) {
    if (t.frac == 0.0) return 0.0;
    long e = 2 * t.exp2;
    if (e > 1100) return HUGE_VAL;
    if (e < -1100) return 0.0;
    return std::ldexp(t.frac * t.frac, static_cast<int>(e));
}

} // namespace avgcase::detail
