// Discounted losses, reservation utilities, and obedience-constraint
// residuals for arbitrary bias/variance paths.
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include <persuasion/multidim.hpp>
#include <persuasion/policy.hpp>
#include <persuasion/process.hpp>
#include <persuasion/quadrature.hpp>

namespace persuasion {

/**
 * A bias path together with a (total) variance path. Both evaluators must
 * be defined for all t >= 0. From tail_start onward the paths are treated
 * as constant, so discounted tails are computed analytically and numerical
 * quadrature only ever runs on the bounded transition interval.
 */
struct PathPair {
    std::function<double(double)> bias;
    std::function<double(double)> variance;
    double tail_start = 0.0;
    double tail_bias = 0.0;
    double tail_variance = 0.0;
    std::vector<double> breakpoints; // kinks of the evaluators, for quadrature splits
};

inline PathPair make_path_pair(const PolicySolution& sol) {
    PathPair pp;
    pp.bias = [sol](double t) { return eval_bias(sol, t); };
    pp.variance = [sol](double t) { return eval_variance(sol, t); };
    if (sol.regime == Regime::kFirstBest) {
        pp.tail_start = 0.0;
        pp.tail_bias = sol.beta;
        pp.tail_variance = 0.0;
    } else if (sol.has_finite_disclosure()) {
        pp.tail_start = sol.T;
        pp.tail_bias = sol.stationary_bias;
        pp.tail_variance = 0.0;
    } else {
        // Exponentially decaying paths with no stationary phase: cut the
        // tail where the integrand is below 1e-20, which is beyond any
        // quadrature tolerance used here.
        const double q = sol.params.r - 2.0 * sol.params.kappa;
        const double scale = sol.b0 * sol.b0 *
                             (1.0 + q / (2.0 * (sol.params.r - sol.params.kappa)));
        pp.tail_start = scale > 0.0 ? std::log(scale / 1e-20) / (2.0 * q) : 0.0;
        pp.tail_start = std::max(pp.tail_start, 0.0);
        pp.tail_bias = 0.0;
        pp.tail_variance = 0.0;
    }
    pp.breakpoints = {0.0, pp.tail_start};
    return pp;
}

inline PathPair make_path_pair(const MultiDimSolution& sol) {
    PathPair pp;
    pp.bias = [sol](double t) { return sol.bias_magnitude(t); };
    pp.variance = [sol](double t) {
        double total = 0.0;
        for (std::size_t c = 0; c < sol.params.n(); ++c) {
            total += sol.variance_component(c, t);
        }
        return total;
    };
    pp.tail_start = sol.regime == Regime::kFirstBest ? 0.0 : sol.full_disclosure_time();
    pp.tail_bias = sol.regime == Regime::kFirstBest ? sol.beta_norm : sol.sigma_hat_total;
    pp.tail_variance = 0.0;
    pp.breakpoints.push_back(0.0);
    for (double t : sol.times) {
        pp.breakpoints.push_back(t);
    }
    return pp;
}

/**
 * Receiver's discounted continuation loss from following the paths:
 * int_t^inf r e^{-r(s-t)} [b^2(s) + v(s)] ds, quadrature up to tail_start
 * plus the exact constant tail.
 */
inline double continuation_loss(const PathPair& pp, double t, double r,
                                double quad_tol = 1e-10) {
    if (t < 0.0) {
        throw std::domain_error("continuation_loss: t must be nonnegative");
    }
    if (!(r > 0.0) || !std::isfinite(pp.tail_start)) {
        throw std::domain_error("continuation_loss: divergent discounted integral");
    }
    const double split = std::max(t, pp.tail_start);
    const double tail_flow =
        pp.tail_bias * pp.tail_bias + pp.tail_variance;
    double loss = tail_flow * std::exp(-r * (split - t));
    if (split > t) {
        auto integrand = [&](double s) {
            const double b = pp.bias(s);
            return r * std::exp(-r * (s - t)) * (b * b + pp.variance(s));
        };
        loss += quad::integrate_split(integrand, t, split, pp.breakpoints, quad_tol);
    }
    return loss;
}

// Deviator's discounted loss from abandoning the policy with posterior
// variance v_t: (sigma^2 + r v_t) / (r - 2 kappa).
inline double reservation_loss(double v_t, const ProcessParams& p) {
    p.validate();
    if (v_t < 0.0) {
        throw std::domain_error("reservation_loss: v_t must be nonnegative");
    }
    return (p.sigma * p.sigma + p.r * v_t) / (p.r - 2.0 * p.kappa);
}

// Multidimensional reservation loss: the sum of the per-component values.
inline double reservation_loss(std::span<const double> v, const MultiParams& p) {
    p.validate();
    if (v.size() != p.n()) {
        throw std::domain_error("reservation_loss: variance vector has wrong dimension");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < p.n(); ++i) {
        if (v[i] < 0.0) {
            throw std::domain_error("reservation_loss: variances must be nonnegative");
        }
        total += (p.sigma[i] * p.sigma[i] + p.r * v[i]) / (p.r - 2.0 * p.kappa[i]);
    }
    return total;
}

struct ObedienceCheck {
    double t = 0.0;
    double excess = 0.0; // continuation loss minus reservation loss; > 0 violates
    bool binding = false;
};

struct ObedienceReport {
    bool obedient = true;
    double tol = 0.0;
    double max_excess = -std::numeric_limits<double>::infinity();
    double argmax_t = 0.0;
    std::vector<ObedienceCheck> checks;
};

namespace detail {

template <class Reservation>
ObedienceReport obedience_scan(const PathPair& pp, double r, std::span<const double> grid,
                               double tol, Reservation&& reservation) {
    ObedienceReport report;
    report.tol = tol;
    report.checks.reserve(grid.size());
    for (double t : grid) {
        const double excess = continuation_loss(pp, t, r) - reservation(t);
        ObedienceCheck check{t, excess, std::abs(excess) < tol};
        if (excess > report.max_excess) {
            report.max_excess = excess;
            report.argmax_t = t;
        }
        report.checks.push_back(check);
    }
    report.obedient = report.max_excess <= tol;
    return report;
}

} // namespace detail

// Obedience check of a scalar path pair on a grid: the continuation loss
// from following may not exceed the reservation loss anywhere.
inline ObedienceReport verify_obedience(const PathPair& pp, const ProcessParams& p,
                                        std::span<const double> grid, double tol) {
    p.validate();
    return detail::obedience_scan(pp, p.r, grid, tol, [&](double t) {
        return reservation_loss(std::max(pp.variance(t), 0.0), p);
    });
}

// Multidimensional obedience: the reservation side sums the per-component
// terms, which requires the component variances rather than their total.
inline ObedienceReport verify_obedience(const MultiDimSolution& sol,
                                        std::span<const double> grid, double tol) {
    const PathPair pp = make_path_pair(sol);
    return detail::obedience_scan(pp, sol.params.r, grid, tol, [&](double t) {
        const std::vector<double> v = sol.variance_vector(t);
        return reservation_loss(v, sol.params);
    });
}

namespace detail {

inline double central_difference(const std::function<double(double)>& f, double t,
                                 double step) {
    return (f(t + step) - f(t - step)) / (2.0 * step);
}

inline void reject_near_breakpoints(double t, double fd_step,
                                    std::span<const double> breakpoints) {
    if (t - fd_step < 0.0) {
        throw std::domain_error("ode_residual: t too close to 0 for finite differences");
    }
    for (double b : breakpoints) {
        if (std::isfinite(b) && std::abs(t - b) < 10.0 * fd_step) {
            throw std::domain_error("ode_residual: t within the exclusion window of a "
                                    "breakpoint");
        }
    }
}

inline double default_fd_step(double t) { return 1e-6 * std::max(1.0, t); }

} // namespace detail

/**
 * Residual of the binding-obedience differential equation
 * (r - 2 kappa) b^2(t) - 2 kappa v(t) - sigma^2 + v'(t), with v' computed
 * by central finite differences. Breakpoints of the path are rejected.
 */
inline double ode_residual(const PathPair& pp, const ProcessParams& p, double t,
                           double fd_step = 0.0) {
    p.validate();
    if (fd_step <= 0.0) {
        fd_step = detail::default_fd_step(t);
    }
    detail::reject_near_breakpoints(t, fd_step, pp.breakpoints);
    const double b = pp.bias(t);
    const double vprime = detail::central_difference(pp.variance, t, fd_step);
    return (p.r - 2.0 * p.kappa) * b * b - 2.0 * p.kappa * pp.variance(t) -
           p.sigma * p.sigma + vprime;
}

// Multidimensional residual: ||b(t)||^2 minus the price-weighted sum of the
// per-component variance terms.
inline double ode_residual(const MultiDimSolution& sol, double t, double fd_step = 0.0) {
    if (fd_step <= 0.0) {
        fd_step = detail::default_fd_step(t);
    }
    std::vector<double> breaks(sol.times);
    breaks.push_back(0.0);
    detail::reject_near_breakpoints(t, fd_step, breaks);
    const double b = sol.bias_magnitude(t);
    double sum = 0.0;
    for (std::size_t c = 0; c < sol.params.n(); ++c) {
        const double kappa = sol.params.kappa[c];
        const double sig_sq = sol.params.sigma[c] * sol.params.sigma[c];
        const double v = sol.variance_component(c, t);
        const double vprime = detail::central_difference(
            [&](double s) { return sol.variance_component(c, s); }, t, fd_step);
        sum += (2.0 * kappa * v + sig_sq - vprime) / (sol.params.r - 2.0 * kappa);
    }
    return b * b - sum;
}

/**
 * Sender's discounted loss int_0^inf r e^{-rt} [(b(t) - beta)^2 + v(t)] dt.
 * For vector-valued policies pass the preference-bias magnitude; the bias
 * vector stays parallel to it.
 */
inline double sender_loss(const PathPair& pp, double beta, double r,
                          double quad_tol = 1e-10) {
    if (!(r > 0.0) || !std::isfinite(pp.tail_start)) {
        throw std::domain_error("sender_loss: divergent discounted integral");
    }
    auto integrand = [&](double t) {
        const double gap = pp.bias(t) - beta;
        return r * std::exp(-r * t) * (gap * gap + pp.variance(t));
    };
    const double tail_gap = pp.tail_bias - beta;
    double loss = (tail_gap * tail_gap + pp.tail_variance) * std::exp(-r * pp.tail_start);
    if (pp.tail_start > 0.0) {
        loss += quad::integrate_split(integrand, 0.0, pp.tail_start, pp.breakpoints,
                                      quad_tol);
    }
    return loss;
}

} // namespace persuasion
