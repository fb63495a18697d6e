// Adaptive Gauss-Kronrod quadrature with absolute-error control.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace persuasion::quad {

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
struct GkEstimate {
    double kronrod;
    double error;
};

template <class F>
GkEstimate<F> gk15(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = kKronrodWeights[7] * fc;
    double gauss = kGaussWeights[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kKronrodNodes[i];
        const double sum = f(center - dx) + f(center + dx);
        kronrod += kKronrodWeights[i] * sum;
        if (i % 2 == 1) {
            gauss += kGaussWeights[i / 2] * sum;
        }
    }
    kronrod *= half;
    gauss *= half;
    return {kronrod, std::abs(kronrod - gauss)};
}

template <class F>
double integrate_recursive(F& f, double a, double b, double abs_tol, int depth) {
    const auto est = gk15(f, a, b);
    if (est.error <= abs_tol || depth >= 48) {
        return est.kronrod;
    }
    const double mid = 0.5 * (a + b);
    return integrate_recursive(f, a, mid, 0.5 * abs_tol, depth + 1) +
           integrate_recursive(f, mid, b, 0.5 * abs_tol, depth + 1);
}

} // namespace detail

// Integrates f over [a, b] to absolute tolerance abs_tol.
template <class F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-10) {
    if (!(a <= b)) {
        throw std::invalid_argument("integrate: inverted interval");
    }
    if (a == b) {
        return 0.0;
    }
    return detail::integrate_recursive(f, a, b, abs_tol, 0);
}

// Integrates f over [a, b], pre-splitting at the given breakpoints so the
// adaptive rule never straddles a kink of a piecewise integrand.
template <class F>
double integrate_split(F&& f, double a, double b, std::span<const double> breakpoints,
                       double abs_tol = 1e-10) {
    std::vector<double> cuts;
    cuts.push_back(a);
    for (double c : breakpoints) {
        if (c > a && c < b) {
            cuts.push_back(c);
        }
    }
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    const double local_tol = abs_tol / static_cast<double>(cuts.size() - 1);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        total += integrate(f, cuts[i], cuts[i + 1], local_tol);
    }
    return total;
}

} // namespace persuasion::quad
