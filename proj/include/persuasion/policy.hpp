// Optimal one-dimensional bias/variance paths: the two-regime closed-form
// solution, its deterministic-state limit, Pareto-frontier points, and
// comparative-statics orderings.
#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>

#include <persuasion/process.hpp>
#include <persuasion/roots.hpp>

namespace persuasion {

enum class Regime { kFirstBest, kConstrained };

/**
 * Closed-form optimal policy for a scalar state.
 *
 * In the constrained regime the bias decays from b0 at rate r - 2*kappa
 * until the full-disclosure time T and stays at the stationary level
 * sigma / sqrt(r - 2*kappa) afterwards; the variance reaches 0 at T. The
 * deterministic-state solution has no finite full-disclosure time, which is
 * encoded as T = +infinity.
 */
struct PolicySolution {
    Regime regime = Regime::kFirstBest;
    double T = 0.0;  // full-disclosure time (+infinity in the sigma = 0 case)
    double t0 = 0.0; // shift applied to the relaxed solution when sigma0_sq binds
    double beta = 0.0;
    ProcessParams params;
    double stationary_bias = 0.0; // sigma / sqrt(r - 2*kappa)
    double b0 = 0.0;              // bias at time 0

    bool has_finite_disclosure() const { return std::isfinite(T); }
};

namespace detail {

// Transition-phase variance as a function of the remaining time x = T - t.
inline double transition_variance(const ProcessParams& p, double x) {
    const double s2 = p.sigma * p.sigma;
    if (kappa_is_zero(p.kappa)) {
        return s2 * ((std::expm1(2.0 * p.r * x)) / (2.0 * p.r) - x);
    }
    const double q = p.r - 2.0 * p.kappa;
    const double c = s2 * q / (2.0 * (p.r - p.kappa));
    return -s2 / (2.0 * p.kappa) +
           c * (std::exp(-2.0 * p.kappa * x) / p.kappa + std::exp(2.0 * q * x) / q);
}

} // namespace detail

inline double eval_bias(const PolicySolution& sol, double t) {
    if (t < 0.0) {
        throw std::domain_error("eval_bias: t must be nonnegative");
    }
    if (sol.regime == Regime::kFirstBest) {
        return sol.beta;
    }
    const double q = sol.params.r - 2.0 * sol.params.kappa;
    if (!sol.has_finite_disclosure()) {
        return sol.b0 * std::exp(-q * t);
    }
    const double x = std::max(sol.T - t, 0.0);
    return sol.stationary_bias * std::exp(q * x);
}

inline double eval_variance(const PolicySolution& sol, double t) {
    if (t < 0.0) {
        throw std::domain_error("eval_variance: t must be nonnegative");
    }
    if (sol.regime == Regime::kFirstBest) {
        return 0.0;
    }
    const double q = sol.params.r - 2.0 * sol.params.kappa;
    if (!sol.has_finite_disclosure()) {
        const double b = sol.b0 * std::exp(-q * t);
        return q / (2.0 * (sol.params.r - sol.params.kappa)) * b * b;
    }
    if (t >= sol.T) {
        return 0.0;
    }
    return detail::transition_variance(sol.params, sol.T - t);
}

/**
 * Solves for the optimal bias/variance paths with sigma > 0.
 *
 * The relaxed full-disclosure time solves b(0) = beta in closed form. If
 * the implied initial variance exceeds sigma0_sq, the relaxed paths are
 * shifted forward by the time t0 at which the relaxed variance first equals
 * sigma0_sq (found by bisection; the relaxed variance is strictly
 * decreasing).
 */
inline PolicySolution solve(const ProcessParams& p, double beta) {
    p.validate();
    if (!(beta > 0.0)) {
        throw std::domain_error("solve: beta must be positive");
    }
    if (p.sigma == 0.0) {
        throw std::domain_error("solve: sigma = 0 is the deterministic-state model; "
                                "use solve_deterministic");
    }
    const double q = p.r - 2.0 * p.kappa;
    const double stationary = p.sigma / std::sqrt(q);

    PolicySolution sol;
    sol.beta = beta;
    sol.params = p;
    sol.stationary_bias = stationary;
    if (beta <= stationary) {
        sol.regime = Regime::kFirstBest;
        sol.T = 0.0;
        sol.t0 = 0.0;
        sol.b0 = beta;
        return sol;
    }

    sol.regime = Regime::kConstrained;
    const double t_relaxed = std::log(beta / stationary) / q;
    const double v0_relaxed = detail::transition_variance(p, t_relaxed);
    if (p.sigma0_sq >= v0_relaxed) {
        sol.T = t_relaxed;
        sol.t0 = 0.0;
    } else {
        sol.t0 = roots::bisect(
            [&](double t) {
                return detail::transition_variance(p, t_relaxed - t) - p.sigma0_sq;
            },
            0.0, t_relaxed);
        sol.T = t_relaxed - sol.t0;
    }
    sol.b0 = stationary * std::exp(q * sol.T);
    return sol;
}

/**
 * Deterministic-state solution (sigma = 0): exponential decay of bias and
 * variance forever, with the initial bias clipped by the initial variance
 * budget.
 */
inline PolicySolution solve_deterministic(const ProcessParams& p, double beta) {
    p.validate();
    if (!(beta > 0.0)) {
        throw std::domain_error("solve_deterministic: beta must be positive");
    }
    if (p.sigma != 0.0) {
        throw std::domain_error("solve_deterministic: requires sigma = 0");
    }
    const double q = p.r - 2.0 * p.kappa;
    PolicySolution sol;
    sol.regime = Regime::kConstrained;
    sol.T = std::numeric_limits<double>::infinity();
    sol.t0 = 0.0;
    sol.beta = beta;
    sol.params = p;
    sol.stationary_bias = 0.0;
    sol.b0 = std::min(beta, std::sqrt(2.0 * p.sigma0_sq * (p.r - p.kappa) / q));
    return sol;
}

/**
 * Point on the Pareto frontier with sender weight pi in [0, 1): the policy
 * maximizing pi*u_S + (1-pi)*u_R, which coincides with the sender-optimal
 * policy for preference bias pi*beta. pi = 0 is the receiver optimum: full
 * disclosure with zero bias.
 */
inline PolicySolution pareto_point(const ProcessParams& p, double beta, double pi) {
    p.validate();
    if (!(beta > 0.0)) {
        throw std::domain_error("pareto_point: beta must be positive");
    }
    if (!(pi >= 0.0 && pi < 1.0)) {
        throw std::domain_error("pareto_point: pi must lie in [0, 1)");
    }
    if (pi == 0.0) {
        PolicySolution sol;
        sol.regime = Regime::kFirstBest;
        sol.T = 0.0;
        sol.t0 = 0.0;
        sol.beta = 0.0;
        sol.params = p;
        sol.stationary_bias =
            p.sigma == 0.0 ? 0.0 : p.sigma / std::sqrt(p.r - 2.0 * p.kappa);
        sol.b0 = 0.0;
        return sol;
    }
    return p.sigma == 0.0 ? solve_deterministic(p, pi * beta) : solve(p, pi * beta);
}

enum class Ordering { kEqual, kIncreasing, kDecreasing, kAmbiguous };

struct OrderingVerdict {
    Ordering order = Ordering::kEqual;
    bool strict = false; // strictly ordered at one or more grid points
};

struct ComparativeStaticsReport {
    OrderingVerdict bias;
    OrderingVerdict variance;
};

/**
 * Pointwise ordering of two solutions' bias and variance paths on a grid
 * (hi relative to lo). Both solutions must be constrained with a
 * non-binding initial variance, the hypothesis under which the monotone
 * comparative statics hold.
 */
inline ComparativeStaticsReport comparative_statics_report(const PolicySolution& lo,
                                                           const PolicySolution& hi,
                                                           std::span<const double> grid,
                                                           double tol = 1e-10) {
    if (lo.regime != Regime::kConstrained || hi.regime != Regime::kConstrained ||
        lo.t0 != 0.0 || hi.t0 != 0.0) {
        throw std::domain_error("comparative_statics_report: requires constrained solutions "
                                "with non-binding initial variance");
    }
    auto classify = [&](auto&& f_lo, auto&& f_hi) {
        OrderingVerdict v;
        bool up = false;
        bool down = false;
        for (double t : grid) {
            const double d = f_hi(t) - f_lo(t);
            if (d > tol) {
                up = true;
            } else if (d < -tol) {
                down = true;
            }
        }
        if (up && down) {
            v.order = Ordering::kAmbiguous;
        } else if (up) {
            v.order = Ordering::kIncreasing;
            v.strict = true;
        } else if (down) {
            v.order = Ordering::kDecreasing;
            v.strict = true;
        } else {
            v.order = Ordering::kEqual;
        }
        return v;
    };
    ComparativeStaticsReport report;
    report.bias = classify([&](double t) { return eval_bias(lo, t); },
                           [&](double t) { return eval_bias(hi, t); });
    report.variance = classify([&](double t) { return eval_variance(lo, t); },
                               [&](double t) { return eval_variance(hi, t); });
    return report;
}

} // namespace persuasion
