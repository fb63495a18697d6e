// Two-period bias/precision tradeoff: closed-form solution and an
// independent brute-force grid oracle.
#pragma once

#include <cmath>
#include <span>
#include <stdexcept>

namespace persuasion {

struct TwoPeriodParams {
    double beta = 1.0;      // sender's preference bias, > 0
    double delta = 1.0;     // discount factor in (0, 1]
    double rho = 0.0;       // persistence of the state between periods
    double sigma = 0.0;     // innovation standard deviation, >= 0
    double sigma1_sq = 0.0; // first-period prior variance, >= 0

    void validate() const {
        if (!std::isfinite(beta) || !std::isfinite(delta) || !std::isfinite(rho) ||
            !std::isfinite(sigma) || !std::isfinite(sigma1_sq)) {
            throw std::domain_error("TwoPeriodParams: parameters must be finite");
        }
        if (!(beta > 0.0)) {
            throw std::domain_error("TwoPeriodParams: beta must be positive");
        }
        if (!(delta > 0.0 && delta <= 1.0)) {
            throw std::domain_error("TwoPeriodParams: delta must lie in (0, 1]");
        }
        if (sigma < 0.0 || sigma1_sq < 0.0) {
            throw std::domain_error("TwoPeriodParams: sigma and sigma1_sq must be "
                                    "nonnegative");
        }
    }
};

enum class TwoPeriodCase {
    kNotBinding,    // beta <= sqrt(delta) sigma: first-best feasible
    kNoPersistence, // rho = 0: no bias/precision tradeoff
    kBinding,       // constraint active, interior first-order solution
};

struct TwoPeriodSolution {
    double b1 = 0.0;
    double v1 = 0.0;
    TwoPeriodCase case_id = TwoPeriodCase::kNotBinding;
    // Interior formula returned a negative variance; the boundary solution
    // with v1 = 0 is reported instead.
    bool clipped_to_zero_variance = false;
    // Interior variance exceeds sigma1_sq, so no signal structure attains it.
    bool infeasible_signal = false;
};

/**
 * First-period optimum of the two-period example. The binding case uses
 * the interior closed form
 *
 *   b1 = beta d r^2 / (1 + d r^2),  v1 = beta^2 d r^2 / (1 + d r^2)^2 - s^2 / r^2
 *
 * (d = delta, r = rho, s = sigma), clipped to the v1 = 0 face when the
 * formula's variance is negative.
 */
inline TwoPeriodSolution solve_two_period(const TwoPeriodParams& tp) {
    tp.validate();
    TwoPeriodSolution sol;
    const double sqrt_delta_sigma = std::sqrt(tp.delta) * tp.sigma;
    if (tp.beta <= sqrt_delta_sigma) {
        sol.case_id = TwoPeriodCase::kNotBinding;
        sol.b1 = tp.beta;
        sol.v1 = 0.0;
        return sol;
    }
    if (tp.rho == 0.0) {
        sol.case_id = TwoPeriodCase::kNoPersistence;
        sol.b1 = std::min(tp.beta, sqrt_delta_sigma);
        sol.v1 = 0.0;
        return sol;
    }
    sol.case_id = TwoPeriodCase::kBinding;
    const double dr2 = tp.delta * tp.rho * tp.rho;
    sol.b1 = tp.beta * dr2 / (1.0 + dr2);
    sol.v1 = tp.beta * tp.beta * dr2 / ((1.0 + dr2) * (1.0 + dr2)) -
             tp.sigma * tp.sigma / (tp.rho * tp.rho);
    if (sol.v1 < 0.0) {
        sol.clipped_to_zero_variance = true;
        sol.v1 = 0.0;
        sol.b1 = std::min(tp.beta, sqrt_delta_sigma);
    } else if (sol.v1 > tp.sigma1_sq) {
        sol.infeasible_signal = true;
    }
    return sol;
}

struct TwoPeriodBruteForce {
    double b1 = 0.0;
    double v1 = 0.0;
    double objective = 0.0;
};

/**
 * Exhaustive grid argmax of the sender's payoff -(b1 - beta)^2 - v1 -
 * delta beta^2 over the feasible set b1^2 <= delta (rho^2 v1 + sigma^2),
 * 0 <= v1 <= sigma1_sq. Iteration order (v ascending, then b ascending)
 * breaks exact ties toward smaller v1, then smaller b1.
 */
inline TwoPeriodBruteForce brute_force_two_period(const TwoPeriodParams& tp,
                                                  std::span<const double> grid_b,
                                                  std::span<const double> grid_v) {
    tp.validate();
    if (grid_b.empty() || grid_v.empty()) {
        throw std::domain_error("brute_force_two_period: empty grid");
    }
    const double feas_tol = 1e-12;
    bool found = false;
    TwoPeriodBruteForce best;
    best.objective = -1.0 / 0.0;
    for (double v : grid_v) {
        if (v < 0.0 || v > tp.sigma1_sq + feas_tol) {
            continue;
        }
        const double budget = tp.delta * (tp.rho * tp.rho * v + tp.sigma * tp.sigma);
        for (double b : grid_b) {
            if (b < 0.0 || b * b > budget + feas_tol) {
                continue;
            }
            const double gap = b - tp.beta;
            const double objective = -gap * gap - v - tp.delta * tp.beta * tp.beta;
            if (objective > best.objective) {
                best = {b, v, objective};
                found = true;
            }
        }
    }
    if (!found) {
        throw std::domain_error("brute_force_two_period: no feasible grid point");
    }
    return best;
}

} // namespace persuasion
