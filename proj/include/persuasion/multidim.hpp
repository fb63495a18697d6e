// Multidimensional sequential-disclosure solver: the shooting procedure
// over the chain of initial-variance vectors, nested bisections over the
// single-crossing objective, and the closed-form path evaluators.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <persuasion/policy.hpp>
#include <persuasion/process.hpp>
#include <persuasion/roots.hpp>

namespace persuasion {

/**
 * Parameters of the n-component state. Components are ordered by
 * increasing persistence (kappa ascending) and evolve independently; each
 * requires sigma_i > 0 and 2*kappa_i < r.
 */
struct MultiParams {
    std::vector<double> kappa;
    std::vector<double> sigma;
    std::vector<double> sigma0_sq;
    std::vector<double> beta;
    double r = 1.0;

    std::size_t n() const { return kappa.size(); }

    void validate() const {
        const std::size_t m = kappa.size();
        if (m == 0 || sigma.size() != m || sigma0_sq.size() != m || beta.size() != m) {
            throw std::domain_error("MultiParams: component vectors must be nonempty "
                                    "and equal-length");
        }
        if (!(r > 0.0)) {
            throw std::domain_error("MultiParams: r must be positive");
        }
        double beta_sq = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (i > 0 && kappa[i] < kappa[i - 1]) {
                throw std::domain_error("MultiParams: kappa must be sorted ascending");
            }
            if (2.0 * kappa[i] >= r) {
                throw std::domain_error("MultiParams: 2*kappa_i < r required");
            }
            if (!(sigma[i] > 0.0)) {
                throw std::domain_error("MultiParams: sigma_i must be positive");
            }
            if (sigma0_sq[i] < 0.0) {
                throw std::domain_error("MultiParams: sigma0_sq_i must be nonnegative");
            }
            beta_sq += beta[i] * beta[i];
        }
        if (beta_sq == 0.0) {
            throw std::domain_error("MultiParams: beta must not be the zero vector");
        }
    }

    double beta_norm() const {
        double s = 0.0;
        for (double b : beta) {
            s += b * b;
        }
        return std::sqrt(s);
    }

    // Scalar process of component i (mean fields unused here).
    ProcessParams component(std::size_t i) const {
        return ProcessParams{kappa[i], sigma[i], r, 0.0, sigma0_sq[i]};
    }
};

struct SigmaHat {
    std::vector<double> partial_sq; // partial_sq[j] = sum_{i<=j} sigma_i^2 / (r - 2 kappa_i)
    double total = 0.0;             // sqrt(partial_sq.back())
};

// Maximal bias magnitude sustainable with the receiver kept perfectly
// informed, together with its per-component partial sums.
inline SigmaHat sigma_hat(const MultiParams& p) {
    p.validate();
    SigmaHat out;
    out.partial_sq.resize(p.n());
    double acc = 0.0;
    for (std::size_t i = 0; i < p.n(); ++i) {
        acc += p.sigma[i] * p.sigma[i] / (p.r - 2.0 * p.kappa[i]);
        out.partial_sq[i] = acc;
    }
    out.total = std::sqrt(acc);
    return out;
}

namespace detail {

// Variance of the active component during a phase, as a function of the
// elapsed time s, solving v' = 2 kappa v - q (B^2 e^{-2 q s} - shat_sq)
// from v(0) = nu, with q = r - 2 kappa.
inline double phase_variance(double s, double nu, double b_start, double kappa, double r,
                             double shat_sq) {
    const double q = r - 2.0 * kappa;
    const double b2 = b_start * b_start;
    if (kappa_is_zero(kappa)) {
        return nu - 0.5 * b2 * (1.0 - std::exp(-2.0 * r * s)) + r * shat_sq * s;
    }
    const double g = std::exp(2.0 * kappa * s);
    return g * nu - q * b2 / (2.0 * (r - kappa)) * (g - std::exp(-2.0 * q * s)) +
           q * shat_sq / (2.0 * kappa) * (g - 1.0);
}

} // namespace detail

struct ShootPhase {
    std::size_t comp = 0; // active component (0-based)
    double t_start = 0.0;
    double t_end = 0.0;
    double b_start = 0.0;
    std::vector<double> v_start;
};

/**
 * Outcome of one run of the shooting procedure. Phase boundaries double as
 * the candidate full-disclosure times; if the bias magnitude reaches
 * sigma_hat before every variance is exhausted, the remaining entries of
 * `times` are filled with the terminal time T.
 */
struct ShootResult {
    std::vector<double> times; // t_1..t_n (0-based storage)
    double T = 0.0;
    double f = 0.0; // ||b(T)|| - sigma_hat - sum_i v_i(T)
    std::vector<ShootPhase> phases;
    double b_end = 0.0;
    std::vector<double> v_end;
    MultiParams params;
    double sigma_hat_total = 0.0;
    std::vector<double> sigma_hat_partial_sq;

    double bias_at(double t) const {
        if (t < 0.0) {
            throw std::domain_error("ShootResult: t must be nonnegative");
        }
        for (const ShootPhase& ph : phases) {
            if (t >= ph.t_start && t <= ph.t_end) {
                const double q = params.r - 2.0 * params.kappa[ph.comp];
                return ph.b_start * std::exp(-q * (t - ph.t_start));
            }
        }
        return b_end;
    }

    std::vector<double> variances_at(double t) const {
        if (t < 0.0) {
            throw std::domain_error("ShootResult: t must be nonnegative");
        }
        for (const ShootPhase& ph : phases) {
            if (t >= ph.t_start && t <= ph.t_end) {
                std::vector<double> v(params.n(), 0.0);
                const double s = t - ph.t_start;
                for (std::size_t j = ph.comp + 1; j < params.n(); ++j) {
                    v[j] = eta(ph.v_start[j], s, params.component(j));
                }
                v[ph.comp] = std::max(
                    detail::phase_variance(s, ph.v_start[ph.comp], ph.b_start,
                                           params.kappa[ph.comp], params.r,
                                           sigma_hat_partial_sq[ph.comp]),
                    0.0);
                return v;
            }
        }
        return v_end;
    }
};

/**
 * Runs the shooting procedure from bias magnitude alpha >= sigma_hat and a
 * chain point nu (zeros below one partially filled component, full initial
 * variances above it). Each phase uses the closed-form solutions of the
 * phase dynamics; phase ends are located analytically (bias crossing) or by
 * bisection on the closed-form variance.
 */
inline ShootResult shoot(double alpha, std::span<const double> nu, const MultiParams& p) {
    p.validate();
    const SigmaHat sh = sigma_hat(p);
    const std::size_t n = p.n();
    if (nu.size() != n) {
        throw std::domain_error("shoot: nu has wrong dimension");
    }
    if (alpha < sh.total - 1e-12) {
        throw std::domain_error("shoot: alpha must be at least sigma_hat");
    }
    std::size_t i0 = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (nu[i] < -1e-12 || nu[i] > p.sigma0_sq[i] + 1e-9) {
            throw std::domain_error("shoot: nu outside [0, sigma0_sq]");
        }
        if (i0 == n && nu[i] > 0.0) {
            i0 = i;
        }
        if (i0 < n && i > i0 && std::abs(nu[i] - p.sigma0_sq[i]) > 1e-9) {
            throw std::domain_error("shoot: nu is not a chain point");
        }
    }

    ShootResult res;
    res.params = p;
    res.sigma_hat_total = sh.total;
    res.sigma_hat_partial_sq = sh.partial_sq;
    res.times.assign(n, 0.0);
    res.v_end.assign(nu.begin(), nu.end());
    for (std::size_t j = 0; j < i0; ++j) {
        res.v_end[j] = 0.0;
    }
    double b = alpha;
    double t = 0.0;
    bool terminated = false;
    std::size_t comp = i0;
    for (; comp < n && !terminated; ++comp) {
        const double q = p.r - 2.0 * p.kappa[comp];
        const double s_bias = b > sh.total ? std::log(b / sh.total) / q : 0.0;
        if (s_bias <= 0.0) {
            terminated = true;
            break;
        }
        const double nu_c = res.v_end[comp];
        if (nu_c <= 0.0) {
            res.v_end[comp] = 0.0;
            res.times[comp] = t;
            continue; // component already exhausted: zero-length phase
        }
        ShootPhase ph;
        ph.comp = comp;
        ph.t_start = t;
        ph.b_start = b;
        ph.v_start = res.v_end;
        auto v_of = [&](double s) {
            return detail::phase_variance(s, nu_c, b, p.kappa[comp], p.r,
                                          sh.partial_sq[comp]);
        };
        double s_end;
        if (v_of(s_bias) > 0.0) {
            s_end = s_bias; // bias reaches sigma_hat with variance left over
            terminated = true;
        } else {
            s_end = roots::bisect(v_of, 0.0, s_bias, 1e-13);
        }
        t += s_end;
        for (std::size_t j = comp + 1; j < n; ++j) {
            res.v_end[j] = eta(res.v_end[j], s_end, p.component(j));
        }
        res.v_end[comp] = terminated ? std::max(v_of(s_end), 0.0) : 0.0;
        b *= std::exp(-q * s_end);
        ph.t_end = t;
        res.times[comp] = t;
        res.phases.push_back(std::move(ph));
    }
    // Entries not reached before termination share the terminal time.
    for (std::size_t j = comp; j < n; ++j) {
        res.times[j] = t;
    }
    res.T = t;
    res.b_end = b;
    res.f = b - sh.total - std::accumulate(res.v_end.begin(), res.v_end.end(), 0.0);
    return res;
}

/**
 * Optimal multidimensional policy. The bias vector stays parallel to beta;
 * its magnitude decays at rate r - 2*kappa_i between the full-disclosure
 * times t_{i-1} and t_i and equals sigma_hat from t_n on. Components below
 * the critical one are disclosed immediately.
 */
struct MultiDimSolution {
    Regime regime = Regime::kFirstBest;
    std::size_t i0 = 1;        // 1-based critical component; n+1 when nothing is delayed
    std::vector<double> times; // t_1..t_n
    std::vector<double> tau;   // tau_j = sum_{i>=j} (r-2k_i)(t_i - t_{i-1}); tau[n] = 0
    double sigma_hat_total = 0.0;
    std::vector<double> sigma_hat_partial_sq;
    MultiParams params;
    double beta_norm = 0.0;
    bool unique_kappas = true; // ties pin down only the variance sum

    double bias_magnitude(double t) const {
        if (t < 0.0) {
            throw std::domain_error("MultiDimSolution: t must be nonnegative");
        }
        if (regime == Regime::kFirstBest) {
            return beta_norm;
        }
        double exponent = 0.0;
        for (std::size_t i = 0; i < params.n(); ++i) {
            const double prev = i == 0 ? 0.0 : times[i - 1];
            const double q = params.r - 2.0 * params.kappa[i];
            exponent += q * std::max(times[i] - std::max(t, prev), 0.0);
        }
        return sigma_hat_total * std::exp(exponent);
    }

    std::vector<double> bias_vector(double t) const {
        std::vector<double> out(params.beta);
        const double scale = bias_magnitude(t) / beta_norm;
        for (double& x : out) {
            x *= scale;
        }
        return out;
    }

    double variance_component(std::size_t c, double t) const {
        if (c >= params.n()) {
            throw std::domain_error("MultiDimSolution: component out of range");
        }
        if (t < 0.0) {
            throw std::domain_error("MultiDimSolution: t must be nonnegative");
        }
        if (regime == Regime::kFirstBest || c + 1 < i0) {
            return 0.0;
        }
        const double prev = c == 0 ? 0.0 : times[c - 1];
        const double kappa = params.kappa[c];
        const double sig_sq = params.sigma[c] * params.sigma[c];
        if (t < prev) {
            // No information about component c before its phase: the later
            // boundary value pulled back along the no-information law.
            const double v_prev = variance_component(c, prev);
            if (kappa_is_zero(kappa)) {
                return v_prev + sig_sq * (t - prev);
            }
            return -sig_sq / (2.0 * kappa) +
                   (v_prev + sig_sq / (2.0 * kappa)) * std::exp(2.0 * kappa * (t - prev));
        }
        const double q = params.r - 2.0 * kappa;
        const double x = std::max(times[c] - t, 0.0);
        const double shat_c_sq = sigma_hat_partial_sq[c];
        const double tau_next = tau[c + 1];
        double term1;
        if (kappa_is_zero(kappa)) {
            term1 = -shat_c_sq * q * x;
        } else {
            term1 = shat_c_sq * q / (2.0 * kappa) * std::expm1(-2.0 * kappa * x);
        }
        const double total_sq = sigma_hat_total * sigma_hat_total;
        const double term2 = total_sq * q * std::exp(2.0 * tau_next) /
                             (2.0 * (params.r - kappa)) *
                             (std::exp(2.0 * q * x) - std::exp(-2.0 * kappa * x));
        return term1 + term2;
    }

    std::vector<double> variance_vector(double t) const {
        std::vector<double> out(params.n(), 0.0);
        for (std::size_t c = 0; c < params.n(); ++c) {
            out[c] = variance_component(c, t);
        }
        return out;
    }

    double full_disclosure_time() const { return times.empty() ? 0.0 : times.back(); }
};

namespace detail {

// Chain point at position xi in [0, m]: the top m components with positive
// initial variance are filled from the most persistent downward, the
// component at the fractional position partially.
inline std::vector<double> chain_point(double xi, const MultiParams& p,
                                       std::span<const std::size_t> chain) {
    std::vector<double> nu(p.n(), 0.0);
    const double m = static_cast<double>(chain.size());
    xi = std::clamp(xi, 0.0, m);
    const std::size_t whole = static_cast<std::size_t>(std::floor(xi));
    for (std::size_t k = 0; k < whole && k < chain.size(); ++k) {
        nu[chain[k]] = p.sigma0_sq[chain[k]];
    }
    const double frac = xi - std::floor(xi);
    if (frac > 0.0 && whole < chain.size()) {
        nu[chain[whole]] = frac * p.sigma0_sq[chain[whole]];
    }
    return nu;
}

} // namespace detail

/**
 * Solves the n-dimensional problem. Below the sustainable-bias threshold
 * the first-best policy is returned. Otherwise the initial bias magnitude
 * and initial variance vector are found by bisection: first on the bias
 * magnitude at the full chain point (the shooting objective is strictly
 * single-crossing from below in it), then, if the preference bias is not
 * reachable, along the chain of initial-variance vectors (single-crossing
 * from above).
 */
inline MultiDimSolution solve_multidim(const MultiParams& p) {
    p.validate();
    const SigmaHat sh = sigma_hat(p);
    const std::size_t n = p.n();
    const double bnorm = p.beta_norm();

    MultiDimSolution sol;
    sol.params = p;
    sol.beta_norm = bnorm;
    sol.sigma_hat_total = sh.total;
    sol.sigma_hat_partial_sq = sh.partial_sq;
    sol.times.assign(n, 0.0);
    sol.tau.assign(n + 1, 0.0);
    sol.unique_kappas = true;
    for (std::size_t i = 1; i < n; ++i) {
        if (p.kappa[i] == p.kappa[i - 1]) {
            sol.unique_kappas = false;
        }
    }

    if (bnorm <= sh.total) {
        sol.regime = Regime::kFirstBest;
        sol.i0 = n + 1;
        return sol;
    }
    sol.regime = Regime::kConstrained;

    std::vector<std::size_t> chain;
    for (std::size_t i = n; i-- > 0;) {
        if (p.sigma0_sq[i] > 0.0) {
            chain.push_back(i);
        }
    }
    const std::vector<double> nu_bar = detail::chain_point(
        static_cast<double>(chain.size()), p, chain);
    const double nu_bar_sum = std::accumulate(nu_bar.begin(), nu_bar.end(), 0.0);

    double alpha_hat = sh.total;
    if (nu_bar_sum > 0.0) {
        auto f_alpha = [&](double a) { return shoot(a, nu_bar, p).f; };
        const double hi =
            roots::expand_until([&](double a) { return f_alpha(a) > 0.0; }, sh.total,
                                sh.total + 1.0);
        alpha_hat = roots::bisect(f_alpha, sh.total, hi);
    }

    double alpha0;
    std::vector<double> nu0;
    if (bnorm >= alpha_hat) {
        alpha0 = alpha_hat;
        nu0 = nu_bar;
    } else {
        alpha0 = bnorm;
        auto f_xi = [&](double xi) {
            return shoot(bnorm, detail::chain_point(xi, p, chain), p).f;
        };
        const double xi = roots::bisect(f_xi, 0.0, static_cast<double>(chain.size()));
        nu0 = detail::chain_point(xi, p, chain);
    }

    const ShootResult shot = shoot(alpha0, nu0, p);
    sol.times = shot.times;
    sol.i0 = n + 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (nu0[i] > 0.0) {
            sol.i0 = i + 1;
            break;
        }
    }
    for (std::size_t j = n; j-- > 0;) {
        const double prev = j == 0 ? 0.0 : sol.times[j - 1];
        sol.tau[j] = sol.tau[j + 1] + (p.r - 2.0 * p.kappa[j]) * (sol.times[j] - prev);
    }
    return sol;
}

// Bias and variance vectors at time t.
inline std::pair<std::vector<double>, std::vector<double>> eval_multi(
    const MultiDimSolution& sol, double t) {
    return {sol.bias_vector(t), sol.variance_vector(t)};
}

} // namespace persuasion
