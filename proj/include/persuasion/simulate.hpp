// Monte Carlo validation of the delayed-reporting implementation: payoff
// estimation along exactly sampled state paths and grim-trigger deviation
// tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <persuasion/policy.hpp>
#include <persuasion/process.hpp>
#include <persuasion/reporting.hpp>
#include <persuasion/rng.hpp>
#include <persuasion/util.hpp>

namespace persuasion {

struct SimConfig {
    std::size_t n_paths = 10000;
    double dt = 1e-3;
    double horizon = 0.0; // must cover the policy's full-disclosure time
    bool analytic_tail = true;
    std::uint64_t base_seed = 0;
    std::vector<double> deviation_times; // grim-trigger deviation checks
    std::vector<double> checkpoints;     // empirical bias/variance checks

    void validate() const {
        if (n_paths == 0) {
            throw std::domain_error("SimConfig: n_paths must be positive");
        }
        if (!(dt > 0.0) || !(horizon > 0.0)) {
            throw std::domain_error("SimConfig: dt and horizon must be positive");
        }
    }
};

struct Estimate {
    double value = 0.0;
    std::optional<double> se; // absent when n_paths = 1
};

struct DeviationTest {
    double t_dev = 0.0;
    Estimate deviation_loss;
    Estimate follow_loss;
    std::optional<double> diff_se; // SE of the paired per-path difference
    bool profitable = false;       // deviation beats following beyond 4 paired SEs
};

struct CheckpointStat {
    double t = 0.0;
    Estimate bias;     // sample mean of A_t - theta_t
    Estimate variance; // sample variance of theta_t - E[theta_t | report]
};

struct SimResult {
    Estimate sender_loss;
    Estimate receiver_loss;
    std::vector<DeviationTest> deviation_tests;
    std::vector<CheckpointStat> checkpoints;
    std::size_t n_paths = 0;
    double dt = 0.0;
    double horizon = 0.0;
    std::uint64_t base_seed = 0;
};

namespace detail {

inline Estimate mean_estimate(std::span<const double> xs) {
    const double n = static_cast<double>(xs.size());
    Estimate e;
    e.value = pairwise_sum(xs) / n;
    if (xs.size() > 1) {
        std::vector<double> sq(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double d = xs[i] - e.value;
            sq[i] = d * d;
        }
        const double var = pairwise_sum(sq) / (n - 1.0);
        e.se = std::sqrt(var / n);
    }
    return e;
}

// Sample variance with the normal-approximation standard error
// s^2 sqrt(2/(n-1)).
inline Estimate variance_estimate(std::span<const double> xs) {
    Estimate e;
    if (xs.size() < 2) {
        e.value = 0.0;
        return e;
    }
    const double n = static_cast<double>(xs.size());
    const double mean = pairwise_sum(xs) / n;
    std::vector<double> sq(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double d = xs[i] - mean;
        sq[i] = d * d;
    }
    e.value = pairwise_sum(sq) / (n - 1.0);
    e.se = e.value * std::sqrt(2.0 / (n - 1.0));
    return e;
}

inline std::size_t snap_index(double t, double dt, std::size_t max_index) {
    const auto idx = static_cast<std::size_t>(std::llround(std::max(t, 0.0) / dt));
    return std::min(idx, max_index);
}

} // namespace detail

/**
 * Simulates the delayed-reporting decision rule induced by (sol, phi):
 * exact path sampling on the step grid plus every reported time, discounted
 * left-endpoint Riemann losses, and the deterministic stationary tail
 * beyond the horizon when analytic_tail is set. Deviation tests reuse the
 * same paths for the follow and deviate arms (common random numbers).
 */
inline SimResult simulate_policy(const PolicySolution& sol, const ReportingFunction& phi,
                                 const SimConfig& cfg) {
    cfg.validate();
    const ProcessParams& p = sol.params;
    p.validate();
    if (sol.has_finite_disclosure() && cfg.horizon < sol.T) {
        throw std::invalid_argument("simulate_policy: horizon must cover the "
                                    "full-disclosure time");
    }
    if (!sol.has_finite_disclosure() && cfg.analytic_tail) {
        throw std::invalid_argument("simulate_policy: analytic tail requires a "
                                    "stationary phase (finite T)");
    }
    // The reporting function must induce this policy's variance path.
    for (double t : linspace(0.0, cfg.horizon, 101)) {
        if (std::abs(induced_variance(phi, t, p) - eval_variance(sol, t)) > 1e-6) {
            throw std::invalid_argument("simulate_policy: reporting function does not "
                                        "induce the policy's variance path");
        }
    }

    const std::size_t steps = static_cast<std::size_t>(std::ceil(cfg.horizon / cfg.dt));
    const std::size_t last = steps; // grid has steps+1 points; losses use [0, steps)
    const double h = static_cast<double>(steps) * cfg.dt;

    std::vector<double> t_grid(steps + 1);
    std::vector<double> phi_val(steps + 1);
    std::vector<int> phi_kind(steps + 1); // -1 no info, 0 pre-history, 1 on-path
    std::vector<double> bias(steps + 1);
    std::vector<double> disc(steps + 1);  // e^{-r t_j}
    std::vector<double> egrow(steps + 1); // e^{kappa t_j}
    for (std::size_t j = 0; j <= steps; ++j) {
        t_grid[j] = static_cast<double>(j) * cfg.dt;
        const ReportTime ph = phi(t_grid[j]);
        if (ph.is_minus_infinity()) {
            phi_kind[j] = -1;
            phi_val[j] = 0.0;
        } else {
            phi_val[j] = ph.value();
            phi_kind[j] = ph.value() >= 0.0 ? 1 : 0;
        }
        bias[j] = eval_bias(sol, t_grid[j]);
        disc[j] = std::exp(-p.r * t_grid[j]);
        egrow[j] = std::exp(p.kappa * t_grid[j]);
    }

    // Forward sampling times: the step grid plus every on-path report time.
    std::vector<double> fwd_times(t_grid);
    for (std::size_t j = 0; j <= steps; ++j) {
        if (phi_kind[j] == 1) {
            fwd_times.push_back(std::min(phi_val[j], t_grid[j]));
        }
    }
    std::sort(fwd_times.begin(), fwd_times.end());
    fwd_times.erase(std::unique(fwd_times.begin(), fwd_times.end()), fwd_times.end());
    auto fwd_index = [&](double t) {
        return static_cast<std::size_t>(
            std::lower_bound(fwd_times.begin(), fwd_times.end(), t) - fwd_times.begin());
    };
    std::vector<std::size_t> grid_idx(steps + 1);
    std::vector<std::size_t> rep_idx(steps + 1, 0);
    for (std::size_t j = 0; j <= steps; ++j) {
        grid_idx[j] = fwd_index(t_grid[j]);
        if (phi_kind[j] == 1) {
            rep_idx[j] = fwd_index(std::min(phi_val[j], t_grid[j]));
        }
    }

    // Pre-history sampled only at the referenced times.
    std::vector<double> pre_times;
    for (std::size_t j = 0; j <= steps; ++j) {
        if (phi_kind[j] == 0) {
            pre_times.push_back(phi_val[j]);
        }
    }
    std::sort(pre_times.begin(), pre_times.end());
    pre_times.erase(std::unique(pre_times.begin(), pre_times.end()), pre_times.end());
    std::vector<std::size_t> pre_idx(steps + 1, 0);
    for (std::size_t j = 0; j <= steps; ++j) {
        if (phi_kind[j] == 0) {
            pre_idx[j] = static_cast<std::size_t>(
                std::lower_bound(pre_times.begin(), pre_times.end(), phi_val[j]) -
                pre_times.begin());
        }
    }

    const double b_stat =
        sol.regime == Regime::kFirstBest ? sol.beta : sol.stationary_bias;
    const double q = p.r - 2.0 * p.kappa;
    std::vector<std::size_t> dev_idx(cfg.deviation_times.size());
    for (std::size_t d = 0; d < cfg.deviation_times.size(); ++d) {
        dev_idx[d] = detail::snap_index(cfg.deviation_times[d], cfg.dt, last - 1);
    }
    std::vector<std::size_t> chk_idx(cfg.checkpoints.size());
    for (std::size_t c = 0; c < cfg.checkpoints.size(); ++c) {
        chk_idx[c] = detail::snap_index(cfg.checkpoints[c], cfg.dt, last);
    }

    const std::size_t n = cfg.n_paths;
    std::vector<double> sender(n);
    std::vector<double> receiver(n);
    std::vector<std::vector<double>> dev_loss(dev_idx.size(), std::vector<double>(n));
    std::vector<std::vector<double>> fol_loss(dev_idx.size(), std::vector<double>(n));
    std::vector<std::vector<double>> chk_bias(chk_idx.size(), std::vector<double>(n));
    std::vector<std::vector<double>> chk_resid(chk_idx.size(), std::vector<double>(n));

    std::vector<double> mean_j(steps + 1);
    std::vector<double> action_j(steps + 1);
    std::vector<double> theta_j(steps + 1);
    std::vector<double> follow_suffix(steps + 1);

    for (std::size_t k = 0; k < n; ++k) {
        const StatePath path =
            sample_path(p, fwd_times, rng::derive_seed(cfg.base_seed, k, 0));
        std::vector<double> pre_values;
        if (!pre_times.empty()) {
            pre_values = sample_prehistory(path.values[fwd_index(0.0)], pre_times,
                                           rng::derive_seed(cfg.base_seed, k, 1));
        }
        for (std::size_t j = 0; j <= steps; ++j) {
            theta_j[j] = path.values[grid_idx[j]];
            switch (phi_kind[j]) {
            case -1:
                mean_j[j] = egrow[j] * p.mu0;
                break;
            case 1:
                mean_j[j] = std::exp(p.kappa * (t_grid[j] - phi_val[j])) *
                            path.values[rep_idx[j]];
                break;
            default:
                mean_j[j] = posterior_given_report(pre_values[pre_idx[j]],
                                                   ReportTime::at(phi_val[j]), t_grid[j], p)
                                .mean;
            }
            action_j[j] = mean_j[j] + bias[j];
        }

        double recv = 0.0;
        double send = 0.0;
        follow_suffix[last] = 0.0;
        for (std::size_t j = last; j-- > 0;) {
            const double err = action_j[j] - theta_j[j];
            const double flow = err * err;
            const double send_err = err - sol.beta;
            recv += p.r * disc[j] * flow * cfg.dt;
            send += p.r * disc[j] * send_err * send_err * cfg.dt;
            follow_suffix[j] = follow_suffix[j + 1] + p.r * disc[j] * flow * cfg.dt;
        }
        if (cfg.analytic_tail) {
            const double gap = b_stat - sol.beta;
            recv += std::exp(-p.r * h) * b_stat * b_stat;
            send += std::exp(-p.r * h) * gap * gap;
        }
        receiver[k] = recv;
        sender[k] = send;

        for (std::size_t c = 0; c < chk_idx.size(); ++c) {
            const std::size_t j = chk_idx[c];
            chk_bias[c][k] = action_j[j] - theta_j[j];
            chk_resid[c][k] = theta_j[j] - mean_j[j];
        }

        for (std::size_t d = 0; d < dev_idx.size(); ++d) {
            const std::size_t jd = dev_idx[d];
            const double inv_disc_d = 1.0 / disc[jd];
            const double inv_egrow_d = 1.0 / egrow[jd];
            double follow = follow_suffix[jd] * inv_disc_d;
            double dev = 0.0;
            for (std::size_t j = jd; j < last; ++j) {
                const double pred = egrow[j] * inv_egrow_d * mean_j[jd];
                const double err = pred - theta_j[j];
                dev += disc[j] * err * err;
            }
            dev *= p.r * cfg.dt * inv_disc_d;
            if (cfg.analytic_tail) {
                const double tail_disc = std::exp(-p.r * (h - t_grid[jd]));
                follow += tail_disc * b_stat * b_stat;
                const double pred_h = egrow[last] * inv_egrow_d * mean_j[jd];
                const double err_h = pred_h - theta_j[last];
                dev += tail_disc *
                       (err_h * err_h * p.r + p.sigma * p.sigma) / q;
            }
            fol_loss[d][k] = follow;
            dev_loss[d][k] = dev;
        }
    }

    SimResult result;
    result.n_paths = n;
    result.dt = cfg.dt;
    result.horizon = h;
    result.base_seed = cfg.base_seed;
    result.sender_loss = detail::mean_estimate(sender);
    result.receiver_loss = detail::mean_estimate(receiver);
    for (std::size_t d = 0; d < dev_idx.size(); ++d) {
        DeviationTest test;
        test.t_dev = t_grid[dev_idx[d]];
        test.deviation_loss = detail::mean_estimate(dev_loss[d]);
        test.follow_loss = detail::mean_estimate(fol_loss[d]);
        std::vector<double> diff(n);
        for (std::size_t k = 0; k < n; ++k) {
            diff[k] = dev_loss[d][k] - fol_loss[d][k];
        }
        const Estimate diff_est = detail::mean_estimate(diff);
        test.diff_se = diff_est.se;
        const double guard = diff_est.se ? 4.0 * *diff_est.se : 0.0;
        test.profitable = diff_est.value < -guard;
        result.deviation_tests.push_back(std::move(test));
    }
    for (std::size_t c = 0; c < chk_idx.size(); ++c) {
        CheckpointStat stat;
        stat.t = t_grid[chk_idx[c]];
        stat.bias = detail::mean_estimate(chk_bias[c]);
        stat.variance = detail::variance_estimate(chk_resid[c]);
        result.checkpoints.push_back(std::move(stat));
    }
    return result;
}

// Grim-trigger deviation at a single time: the receiver follows the rule
// until t_dev, then reverts to myopic play on frozen information while the
// sender stops informing.
inline DeviationTest simulate_deviation(const PolicySolution& sol,
                                        const ReportingFunction& phi, double t_dev,
                                        const SimConfig& cfg) {
    if (t_dev < 0.0) {
        throw std::domain_error("simulate_deviation: t_dev must be nonnegative");
    }
    SimConfig single = cfg;
    single.deviation_times = {t_dev};
    single.checkpoints.clear();
    return simulate_policy(sol, phi, single).deviation_tests.front();
}

} // namespace persuasion
