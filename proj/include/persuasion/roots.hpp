// Bracketed bisection for monotone and single-crossing functions.
#pragma once

#include <cmath>
#include <stdexcept>

namespace persuasion::roots {

inline constexpr double kDefaultBisectTol = 1e-12;

// Finds a zero of f on [lo, hi] by bisection, assuming f changes sign at
// most once on the bracket. Stops when the bracket width falls below
// abs_tol. Endpoints that are already zeros are returned directly.
template <class F>
double bisect(F&& f, double lo, double hi, double abs_tol = kDefaultBisectTol) {
    if (!(lo <= hi)) {
        throw std::invalid_argument("bisect: empty bracket");
    }
    double flo = f(lo);
    if (flo == 0.0) {
        return lo;
    }
    double fhi = f(hi);
    if (fhi == 0.0) {
        return hi;
    }
    if ((flo > 0.0) == (fhi > 0.0)) {
        throw std::invalid_argument("bisect: function does not change sign on bracket");
    }
    while (hi - lo > abs_tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break; // bracket narrower than representable spacing
        }
        const double fmid = f(mid);
        if (fmid == 0.0) {
            return mid;
        }
        if ((fmid > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Expands hi geometrically away from lo until pred(hi) holds.
template <class Pred>
double expand_until(Pred&& pred, double lo, double hi0, int max_doublings = 200) {
    double hi = hi0;
    for (int i = 0; i < max_doublings; ++i) {
        if (pred(hi)) {
            return hi;
        }
        hi = lo + 2.0 * (hi - lo);
    }
    throw std::runtime_error("expand_until: no bracket found");
}

} // namespace persuasion::roots
