// Bayes plausibility of variance paths, construction of the delayed
// reporting function that implements any plausible path, and the induced
// decision rule.
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <persuasion/policy.hpp>
#include <persuasion/process.hpp>
#include <persuasion/util.hpp>

namespace persuasion {

/**
 * Deterministic posterior-variance path v(t) >= 0.
 *
 * Two representations: a sampled grid, interpreted as piecewise linear
 * between samples and clamped outside them, or a closed-form evaluator
 * (possibly carrying the policy solution it came from).
 */
class VariancePath {
  public:
    static VariancePath from_grid(std::vector<double> times, std::vector<double> values) {
        if (times.empty() || times.size() != values.size()) {
            throw std::domain_error("VariancePath: times and values must be nonempty "
                                    "and equal-length");
        }
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (i > 0 && !(times[i] > times[i - 1])) {
                throw std::domain_error("VariancePath: times must be strictly increasing");
            }
            if (!(values[i] >= 0.0) || !std::isfinite(values[i])) {
                throw std::domain_error("VariancePath: values must be finite and nonnegative");
            }
        }
        VariancePath v;
        v.times_ = std::move(times);
        v.values_ = std::move(values);
        return v;
    }

    static VariancePath from_function(std::function<double(double)> fn) {
        VariancePath v;
        v.fn_ = std::move(fn);
        return v;
    }

    static VariancePath from_solution(const PolicySolution& sol) {
        VariancePath v;
        v.sol_ = std::make_shared<PolicySolution>(sol);
        auto held = v.sol_;
        v.fn_ = [held](double t) { return eval_variance(*held, t); };
        return v;
    }

    double operator()(double t) const {
        if (fn_) {
            return fn_(t);
        }
        if (t <= times_.front()) {
            return values_.front();
        }
        if (t >= times_.back()) {
            return values_.back();
        }
        const auto it = std::upper_bound(times_.begin(), times_.end(), t);
        const std::size_t hi = static_cast<std::size_t>(it - times_.begin());
        const std::size_t lo = hi - 1;
        const double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
        return (1.0 - w) * values_[lo] + w * values_[hi];
    }

    bool is_grid() const { return !fn_; }
    const std::vector<double>& grid_times() const { return times_; }
    const std::vector<double>& grid_values() const { return values_; }
    const PolicySolution* solution() const { return sol_.get(); }

  private:
    VariancePath() = default;

    std::vector<double> times_;
    std::vector<double> values_;
    std::function<double(double)> fn_;
    std::shared_ptr<const PolicySolution> sol_;
};

struct PlausibilityViolation {
    enum class Kind { kInitialVariance, kNoDisclosureBound };
    Kind kind = Kind::kInitialVariance;
    double t_from = 0.0; // earlier grid time (equal to t_to for the initial constraint)
    double t_to = 0.0;
    double excess = 0.0; // amount by which the bound is exceeded
};

struct PlausibilityReport {
    bool plausible = true;
    std::vector<PlausibilityViolation> violations;
};

/**
 * Checks (i) v(0) <= sigma0_sq and (ii) v(s) <= eta(v(t), s - t) for
 * adjacent grid pairs, each up to tol. Checking adjacent pairs only is
 * sufficient because eta is a semigroup in its duration argument and
 * increasing in its variance argument.
 */
inline PlausibilityReport is_bayes_plausible(const VariancePath& v, const ProcessParams& p,
                                             std::span<const double> grid, double tol) {
    p.validate();
    if (tol < 0.0) {
        throw std::domain_error("is_bayes_plausible: tol must be nonnegative");
    }
    if (grid.empty() || grid.front() != 0.0) {
        throw std::domain_error("is_bayes_plausible: grid must start at 0");
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw std::domain_error("is_bayes_plausible: grid must be strictly increasing");
        }
    }
    PlausibilityReport report;
    const double v0 = v(0.0);
    if (v0 > p.sigma0_sq + tol) {
        report.plausible = false;
        report.violations.push_back({PlausibilityViolation::Kind::kInitialVariance, 0.0, 0.0,
                                     v0 - p.sigma0_sq});
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double vt = std::max(v(grid[i - 1]), 0.0);
        const double bound = eta(vt, grid[i] - grid[i - 1], p);
        const double vs = v(grid[i]);
        if (vs > bound + tol) {
            report.plausible = false;
            report.violations.push_back({PlausibilityViolation::Kind::kNoDisclosureBound,
                                         grid[i - 1], grid[i], vs - bound});
        }
    }
    return report;
}

/**
 * Delayed-reporting function phi implementing a Bayes-plausible variance
 * path. At time t the sender reports the state realization at time phi(t):
 *
 *   (a) phi(t) = -inf          while v(t) = eta(sigma0_sq, t);
 *   (b) phi(t) < 0             while eta(0,t) < v(t) < eta(sigma0_sq, t),
 *                              referencing the fictitious pre-history;
 *   (c) phi(t) = t - d in [0,t] once v(t) <= eta(0,t), with eta(0,d) = v(t).
 *
 * The case of each t is classified directly from v(t); the stored
 * breakpoints record where the case changes (+inf when a case never ends
 * within the checked horizon).
 */
class ReportingFunction {
  public:
    ReportingFunction(VariancePath v, ProcessParams p, double no_info_until,
                      double prehistory_until)
        : v_(std::move(v)), p_(p), no_info_until_(no_info_until),
          prehistory_until_(prehistory_until) {}

    ReportTime operator()(double t) const {
        if (t < 0.0) {
            throw std::domain_error("ReportingFunction: t must be nonnegative");
        }
        const double vt = std::max(v_(t), 0.0);
        const double top = eta(p_.sigma0_sq, t, p_);
        if (vt >= top - kCaseATol) {
            return ReportTime::minus_infinity();
        }
        const double mid = eta(0.0, t, p_);
        if (vt <= mid) {
            const double d = eta_zero_inverse(vt, p_);
            return ReportTime::at(std::max(t - d, 0.0));
        }
        // Invert eta in its first argument, then map the implied posterior
        // variance of theta_0 back to a pre-history reference time.
        const double w = (vt - mid) * std::exp(-2.0 * p_.kappa * t);
        return ReportTime::at(1.0 / (1.0 / p_.sigma0_sq - 1.0 / w));
    }

    const VariancePath& variance() const { return v_; }
    const ProcessParams& params() const { return p_; }
    double no_info_until() const { return no_info_until_; }
    double prehistory_until() const { return prehistory_until_; }

    static constexpr double kCaseATol = 1e-12;

  private:
    VariancePath v_;
    ProcessParams p_;
    double no_info_until_;
    double prehistory_until_;
};

namespace detail {

// Boundary where pred switches from true to false, located by scanning the
// grid and bisecting the straddling cell. Returns +inf if pred still holds
// at the last grid point.
template <class Pred>
double case_boundary(Pred&& pred, std::span<const double> grid) {
    if (!pred(grid.front())) {
        return grid.front();
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!pred(grid[i])) {
            double lo = grid[i - 1];
            double hi = grid[i];
            while (hi - lo > 1e-12) {
                const double mid = 0.5 * (lo + hi);
                (pred(mid) ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        }
    }
    return std::numeric_limits<double>::infinity();
}

inline std::string describe(const PlausibilityViolation& v) {
    if (v.kind == PlausibilityViolation::Kind::kInitialVariance) {
        return "initial variance constraint violated at t=0 by " + std::to_string(v.excess);
    }
    return "no-disclosure bound violated on [" + std::to_string(v.t_from) + ", " +
           std::to_string(v.t_to) + "] by " + std::to_string(v.excess);
}

} // namespace detail

/**
 * Builds the reporting function for a Bayes-plausible path. Plausibility is
 * checked on check_grid; when empty, the path's own grid is used, or a
 * default grid over the solution's transition phase (closed forms).
 * A non-plausible path is rejected with the first violated constraint.
 */
inline ReportingFunction build_reporting_function(const VariancePath& v, const ProcessParams& p,
                                                  std::span<const double> check_grid = {},
                                                  double tol = 1e-9) {
    p.validate();
    std::vector<double> grid_storage;
    if (check_grid.empty()) {
        if (v.is_grid()) {
            grid_storage = v.grid_times();
            if (grid_storage.front() != 0.0) {
                grid_storage.insert(grid_storage.begin(), 0.0);
            }
        } else {
            double horizon = 1.0 + 10.0 / p.r;
            if (const PolicySolution* sol = v.solution()) {
                horizon = sol->has_finite_disclosure()
                              ? sol->T + 1.0
                              : 8.0 / (p.r - 2.0 * p.kappa);
            }
            grid_storage = linspace(0.0, horizon, 257);
        }
        check_grid = grid_storage;
    }
    const PlausibilityReport report = is_bayes_plausible(v, p, check_grid, tol);
    if (!report.plausible) {
        throw std::domain_error("build_reporting_function: path is not Bayes-plausible: " +
                                detail::describe(report.violations.front()));
    }

    auto in_case_a = [&](double t) {
        return std::max(v(t), 0.0) >= eta(p.sigma0_sq, t, p) - ReportingFunction::kCaseATol;
    };
    auto before_case_c = [&](double t) { return std::max(v(t), 0.0) > eta(0.0, t, p); };
    const double no_info_until = detail::case_boundary(in_case_a, check_grid);
    double prehistory_until = no_info_until;
    if (p.sigma0_sq > 0.0 && std::isfinite(no_info_until)) {
        prehistory_until = detail::case_boundary(before_case_c, check_grid);
    }
    return ReportingFunction(v, p, no_info_until, prehistory_until);
}

// Posterior variance of theta_t induced by the reporting function, with the
// convention Var(theta_t | theta_{-inf}) = eta(sigma0_sq, t).
inline double induced_variance(const ReportingFunction& phi, double t, const ProcessParams& p) {
    return posterior_variance(phi(t), t, p);
}

// Action prescribed by the decision rule: posterior mean given the delayed
// report, plus the bias b_t.
inline double decision_rule_action(double report, ReportTime phi_t, double t, double b_t,
                                   const ProcessParams& p) {
    return posterior_given_report(report, phi_t, t, p).mean + b_t;
}

} // namespace persuasion
