// Scalar Gaussian state process: conditional moments, the no-information
// variance map, exact path sampling, and the fictitious pre-history used as
// the sender's randomization device.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include <persuasion/rng.hpp>

namespace persuasion {

// Persistence-rate magnitudes below this threshold are evaluated through
// their kappa -> 0 limit expressions.
inline constexpr double kKappaZeroTol = 1e-8;

inline bool kappa_is_zero(double kappa) { return std::abs(kappa) < kKappaZeroTol; }

/**
 * Parameters of the state process d(theta) = kappa*theta dt + sigma dZ with
 * theta_0 ~ N(mu0, sigma0_sq), discounted at rate r.
 *
 * Finite discounted payoffs require 2*kappa < r. sigma = 0 is allowed only
 * for the deterministic-state solver.
 */
struct ProcessParams {
    double kappa = 0.0;
    double sigma = 1.0;
    double r = 1.0;
    double mu0 = 0.0;
    double sigma0_sq = 1.0;

    void validate() const {
        if (!std::isfinite(kappa) || !std::isfinite(sigma) || !std::isfinite(r) ||
            !std::isfinite(mu0) || !std::isfinite(sigma0_sq)) {
            throw std::domain_error("ProcessParams: parameters must be finite");
        }
        if (r <= 0.0) {
            throw std::domain_error("ProcessParams: discount rate r must be positive");
        }
        if (2.0 * kappa >= r) {
            throw std::domain_error("ProcessParams: 2*kappa < r required for finite payoffs");
        }
        if (sigma < 0.0) {
            throw std::domain_error("ProcessParams: sigma must be nonnegative");
        }
        if (sigma0_sq < 0.0) {
            throw std::domain_error("ProcessParams: sigma0_sq must be nonnegative");
        }
    }
};

/**
 * No-information variance map: the posterior variance of theta_{t+h} when
 * the posterior variance of theta_t is v and no signal arrives in between.
 *
 *   eta(v, h) = e^{2 kappa h} v + (e^{2 kappa h} - 1) sigma^2 / (2 kappa)
 *
 * with the limit v + sigma^2 h at kappa = 0.
 */
inline double eta(double v, double h, const ProcessParams& p) {
    if (v < 0.0 || h < 0.0) {
        throw std::domain_error("eta: v and h must be nonnegative");
    }
    if (kappa_is_zero(p.kappa)) {
        return v + p.sigma * p.sigma * h;
    }
    const double growth = std::exp(2.0 * p.kappa * h);
    return growth * v + (growth - 1.0) * p.sigma * p.sigma / (2.0 * p.kappa);
}

// Duration d such that eta(0, d) = v. Requires sigma > 0 unless v = 0.
inline double eta_zero_inverse(double v, const ProcessParams& p) {
    if (v < 0.0) {
        throw std::domain_error("eta_zero_inverse: v must be nonnegative");
    }
    if (v == 0.0) {
        return 0.0;
    }
    if (p.sigma <= 0.0) {
        throw std::domain_error("eta_zero_inverse: positive v unreachable with sigma = 0");
    }
    const double s2 = p.sigma * p.sigma;
    if (kappa_is_zero(p.kappa)) {
        return v / s2;
    }
    const double arg = 1.0 + 2.0 * p.kappa * v / s2;
    if (arg <= 0.0) {
        throw std::domain_error("eta_zero_inverse: v above the stationary ceiling");
    }
    return std::log(arg) / (2.0 * p.kappa);
}

// E[theta_{t+dt} | theta_t] = e^{kappa dt} theta_t.
inline double conditional_mean(double theta_t, double dt, const ProcessParams& p) {
    if (dt < 0.0) {
        throw std::domain_error("conditional_mean: dt must be nonnegative");
    }
    return std::exp(p.kappa * dt) * theta_t;
}

/**
 * Time of the state realization revealed by a delayed report. Either a
 * finite time (possibly negative, referencing the fictitious pre-history)
 * or the "no information yet" sentinel. The sentinel is a tagged state,
 * never a floating -inf that could enter arithmetic.
 */
class ReportTime {
  public:
    static ReportTime minus_infinity() { return ReportTime(true, 0.0); }

    static ReportTime at(double t) {
        if (!std::isfinite(t)) {
            throw std::domain_error("ReportTime: finite time required");
        }
        return ReportTime(false, t);
    }

    bool is_minus_infinity() const { return minus_inf_; }

    double value() const {
        if (minus_inf_) {
            throw std::domain_error("ReportTime: no finite value for -infinity");
        }
        return time_;
    }

    friend bool operator==(const ReportTime& a, const ReportTime& b) {
        return a.minus_inf_ == b.minus_inf_ && (a.minus_inf_ || a.time_ == b.time_);
    }

  private:
    ReportTime(bool minus_inf, double t) : minus_inf_(minus_inf), time_(t) {}

    bool minus_inf_;
    double time_;
};

struct StatePath {
    std::vector<double> times;
    std::vector<double> values;
    std::uint64_t seed = 0;
};

/**
 * Samples the state exactly on a strictly increasing grid using the
 * Gaussian transition theta_{t+h} | theta_t ~ N(e^{kappa h} theta_t,
 * eta(0, h)). The draw sequence is fully determined by the seed.
 */
inline StatePath sample_path(const ProcessParams& p, std::span<const double> grid,
                             std::uint64_t seed) {
    p.validate();
    if (grid.empty()) {
        throw std::domain_error("sample_path: empty grid");
    }
    if (grid.front() < 0.0) {
        throw std::domain_error("sample_path: grid must start at or after 0");
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw std::domain_error("sample_path: grid must be strictly increasing");
        }
    }
    StatePath path;
    path.times.assign(grid.begin(), grid.end());
    path.values.resize(grid.size());
    path.seed = seed;

    rng::GaussianStream z(seed);
    double mean = std::exp(p.kappa * grid.front()) * p.mu0;
    double sd = std::sqrt(eta(p.sigma0_sq, grid.front(), p));
    path.values[0] = mean + sd * z.next();
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double h = grid[i] - grid[i - 1];
        mean = std::exp(p.kappa * h) * path.values[i - 1];
        sd = std::sqrt(eta(0.0, h, p));
        path.values[i] = mean + sd * z.next();
    }
    return path;
}

/**
 * Samples the fictitious pre-history theta_t = theta_0 + Y_{-t} (t < 0) at
 * the given times, where Y is a standard Brownian motion independent of the
 * state path. Times are visited in decreasing |t| order; later (smaller-|t|)
 * values are drawn from the Brownian bridge between Y_0 = 0 and the
 * previously drawn point, which reproduces Cov(Y_{-s}, Y_{-t}) =
 * min(-s, -t).
 */
inline std::vector<double> sample_prehistory(double theta0, std::span<const double> pre_times,
                                             std::uint64_t seed) {
    for (double t : pre_times) {
        if (!(t < 0.0)) {
            throw std::domain_error("sample_prehistory: times must be strictly negative");
        }
    }
    std::vector<std::size_t> order(pre_times.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return pre_times[a] < pre_times[b]; });

    rng::GaussianStream z(seed);
    std::vector<double> values(pre_times.size());
    double u_prev = 0.0; // duration of the nearest already-sampled point
    double y_prev = 0.0;
    bool have_prev = false;
    for (std::size_t idx : order) {
        const double u = -pre_times[idx];
        double mean = 0.0;
        double var = u;
        if (have_prev && u_prev > 0.0) {
            mean = y_prev * u / u_prev;
            var = u * (u_prev - u) / u_prev;
        }
        const double y = mean + std::sqrt(std::max(var, 0.0)) * z.next();
        values[idx] = theta0 + y;
        u_prev = u;
        y_prev = y;
        have_prev = true;
    }
    return values;
}

struct PosteriorMoments {
    double mean = 0.0;
    double variance = 0.0;
};

// Posterior variance of theta_t given the report theta_{phi_t} (value not
// needed). Shared by posterior_given_report and the reporting module.
inline double posterior_variance(ReportTime phi_t, double t, const ProcessParams& p) {
    if (phi_t.is_minus_infinity()) {
        return eta(p.sigma0_sq, t, p);
    }
    const double s = phi_t.value();
    if (s > t) {
        throw std::domain_error("posterior_variance: report time exceeds current time");
    }
    if (s >= 0.0) {
        return eta(0.0, t - s, p);
    }
    // Pre-history reference: theta_{phi} = theta_0 + Y_{-phi}, so theta_0 has
    // posterior precision 1/sigma0_sq + 1/(-phi).
    if (p.sigma0_sq == 0.0) {
        return eta(0.0, t, p);
    }
    const double w = 1.0 / (1.0 / p.sigma0_sq - 1.0 / s);
    return eta(w, t, p);
}

/**
 * Posterior mean and variance of theta_t given theta_{phi_t} = report.
 *
 * phi_t = -inf gives the unconditional moments. For phi_t in [0, t] the
 * report is an exact past state. For phi_t < 0 the report is theta_0 plus
 * Brownian pre-history noise; a conjugate normal update on theta_0 is
 * propagated forward to time t.
 */
inline PosteriorMoments posterior_given_report(double report, ReportTime phi_t, double t,
                                               const ProcessParams& p) {
    PosteriorMoments out;
    out.variance = posterior_variance(phi_t, t, p);
    if (phi_t.is_minus_infinity()) {
        out.mean = std::exp(p.kappa * t) * p.mu0;
        return out;
    }
    const double s = phi_t.value();
    if (s >= 0.0) {
        out.mean = std::exp(p.kappa * (t - s)) * report;
        return out;
    }
    const double shrink =
        p.sigma0_sq == 0.0 ? 0.0 : p.sigma0_sq / (p.sigma0_sq - s);
    const double mean0 = p.mu0 + shrink * (report - p.mu0);
    out.mean = std::exp(p.kappa * t) * mean0;
    return out;
}

} // namespace persuasion
