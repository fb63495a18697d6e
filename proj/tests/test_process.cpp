#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include <persuasion/process.hpp>
#include <persuasion/util.hpp>

using namespace persuasion;

namespace {

ProcessParams make_params(double kappa, double sigma, double r, double mu0,
                          double sigma0_sq) {
    return ProcessParams{kappa, sigma, r, mu0, sigma0_sq};
}

const ProcessParams kFig2 = make_params(-0.5, 2.0, 3.0, 0.0, 2.0);

} // namespace

TEST(ProcessParams, RejectsInvalid) {
    EXPECT_THROW(make_params(2.0, 1.0, 3.0, 0.0, 1.0).validate(), std::domain_error);
    EXPECT_THROW(make_params(1.5, 1.0, 3.0, 0.0, 1.0).validate(), std::domain_error);
    EXPECT_THROW(make_params(0.0, -1.0, 3.0, 0.0, 1.0).validate(), std::domain_error);
    EXPECT_THROW(make_params(0.0, 1.0, 0.0, 0.0, 1.0).validate(), std::domain_error);
    EXPECT_THROW(make_params(0.0, 1.0, 3.0, 0.0, -0.5).validate(), std::domain_error);
    EXPECT_NO_THROW(kFig2.validate());
}

TEST(Eta, IdentityAtZeroDuration) {
    EXPECT_DOUBLE_EQ(eta(1.0, 0.0, kFig2), 1.0);
    EXPECT_DOUBLE_EQ(eta(0.0, 0.0, kFig2), 0.0);
}

TEST(Eta, BrownianCase) {
    const auto p = make_params(0.0, 2.0, 3.0, 0.0, 1.0);
    EXPECT_DOUBLE_EQ(eta(1.0, 0.5, p), 3.0);
}

TEST(Eta, MeanRevertingFromZero) {
    const auto p = make_params(-0.5, 2.0, 3.0, 0.0, 1.0);
    const double expected = (1.0 - std::exp(-1.0)) * 4.0; // 2.5284822353...
    EXPECT_NEAR(eta(0.0, 1.0, p), expected, 1e-14);
    EXPECT_NEAR(eta(0.0, 1.0, p), 2.5284822353, 1e-9);
}

TEST(Eta, KappaLimitBranchMatchesExactFormula) {
    // Just outside the limit-branch window the exact formula applies; the
    // two must agree to first order across the threshold.
    const double v = 1.7;
    const double h = 2.3;
    const double sigma = 1.3;
    const auto inside = make_params(1e-9, sigma, 10.0, 0.0, 1.0);
    const auto outside = make_params(1e-7, sigma, 10.0, 0.0, 1.0);
    EXPECT_NEAR(eta(v, h, inside), eta(v, h, outside), 1e-5);
    EXPECT_DOUBLE_EQ(eta(v, h, inside), v + sigma * sigma * h);
}

TEST(Eta, RejectsNegativeArguments) {
    EXPECT_THROW(eta(-1.0, 1.0, kFig2), std::domain_error);
    EXPECT_THROW(eta(1.0, -1.0, kFig2), std::domain_error);
}

TEST(Eta, SemigroupProperty) {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> v_dist(0.0, 100.0);
    std::uniform_real_distribution<double> h_dist(0.0, 10.0);
    std::uniform_real_distribution<double> kappa_dist(-1.2, 0.9);
    std::uniform_real_distribution<double> sigma_dist(0.1, 3.0);
    for (int i = 0; i < 1000; ++i) {
        const double kappa = kappa_dist(gen);
        const auto p = make_params(kappa, sigma_dist(gen), 2.0 * kappa + 1.0 + 2.0, 0.0, 1.0);
        const double v = v_dist(gen);
        const double h1 = h_dist(gen);
        const double h2 = h_dist(gen);
        const double composed = eta(eta(v, h1, p), h2, p);
        const double direct = eta(v, h1 + h2, p);
        EXPECT_NEAR(composed, direct, 1e-12 * std::max(1.0, std::abs(direct)));
    }
}

TEST(Eta, AffineInVariance) {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> v_dist(0.0, 50.0);
    std::uniform_real_distribution<double> a_dist(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double v1 = v_dist(gen);
        const double v2 = v_dist(gen);
        const double a = a_dist(gen);
        const double h = 0.7;
        const double mix = eta(a * v1 + (1.0 - a) * v2, h, kFig2);
        const double sum = a * eta(v1, h, kFig2) + (1.0 - a) * eta(v2, h, kFig2);
        EXPECT_NEAR(mix, sum, 1e-12 * std::max(1.0, std::abs(sum)));
    }
}

TEST(EtaZeroInverse, RoundTrips) {
    const auto p = make_params(-0.5, 2.0, 3.0, 0.0, 1.0);
    for (double v : {0.0, 0.1, 1.0, 2.5}) {
        EXPECT_NEAR(eta(0.0, eta_zero_inverse(v, p), p), v, 1e-12);
    }
    const auto brownian = make_params(0.0, 2.0, 3.0, 0.0, 1.0);
    EXPECT_DOUBLE_EQ(eta_zero_inverse(2.0, brownian), 0.5);
}

TEST(ConditionalMean, ClosedForm) {
    EXPECT_DOUBLE_EQ(conditional_mean(5.0, 0.0, kFig2), 5.0);
    EXPECT_NEAR(conditional_mean(2.0, 1.0, kFig2), 2.0 * std::exp(-0.5), 1e-15);
    const auto brownian = make_params(0.0, 1.0, 3.0, 0.0, 1.0);
    EXPECT_DOUBLE_EQ(conditional_mean(2.0, 1.0, brownian), 2.0);
    EXPECT_THROW(conditional_mean(1.0, -0.1, kFig2), std::domain_error);
}

TEST(SamplePath, DeterministicWhenNoiseFree) {
    const auto constant = make_params(0.0, 0.0, 3.0, 1.0, 0.0);
    const std::vector<double> grid{0.0, 1.0, 2.0};
    const StatePath path = sample_path(constant, grid, 42);
    EXPECT_DOUBLE_EQ(path.values[0], 1.0);
    EXPECT_DOUBLE_EQ(path.values[1], 1.0);
    EXPECT_DOUBLE_EQ(path.values[2], 1.0);

    const auto doubling = make_params(std::log(2.0), 0.0, 3.0, 1.0, 0.0);
    const std::vector<double> grid2{0.0, 1.0};
    const StatePath path2 = sample_path(doubling, grid2, 42);
    EXPECT_DOUBLE_EQ(path2.values[0], 1.0);
    EXPECT_NEAR(path2.values[1], 2.0, 1e-12);
}

TEST(SamplePath, DeterministicGivenSeed) {
    const std::vector<double> grid = linspace(0.0, 2.0, 21);
    const StatePath a = sample_path(kFig2, grid, 123);
    const StatePath b = sample_path(kFig2, grid, 123);
    ASSERT_EQ(a.values.size(), b.values.size());
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        EXPECT_DOUBLE_EQ(a.values[i], b.values[i]);
    }
    const StatePath c = sample_path(kFig2, grid, 124);
    EXPECT_NE(a.values[1], c.values[1]);
}

TEST(SamplePath, RejectsBadGrids) {
    EXPECT_THROW(sample_path(kFig2, std::vector<double>{}, 1), std::domain_error);
    EXPECT_THROW(sample_path(kFig2, std::vector<double>{-1.0, 0.0}, 1), std::domain_error);
    EXPECT_THROW(sample_path(kFig2, std::vector<double>{0.0, 0.0}, 1), std::domain_error);
}

TEST(SamplePath, ExactSamplingLaw) {
    // Mean and variance of theta_1 against the exact transition moments.
    const auto p = make_params(-0.5, 2.0, 3.0, 0.0, 1.0);
    const std::vector<double> grid{0.0, 1.0};
    const std::size_t n = 100000;
    std::vector<double> theta1(n);
    for (std::size_t k = 0; k < n; ++k) {
        theta1[k] = sample_path(p, grid, 1000 + k).values[1];
    }
    const double target_var = eta(1.0, 1.0, p); // 4 - 3 e^{-1}
    double mean = 0.0;
    for (double x : theta1) {
        mean += x;
    }
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double x : theta1) {
        var += (x - mean) * (x - mean);
    }
    var /= static_cast<double>(n - 1);

    const double se_mean = std::sqrt(target_var / static_cast<double>(n));
    const double se_var = target_var * std::sqrt(2.0 / static_cast<double>(n - 1));
    EXPECT_NEAR(mean, 0.0, 4.0 * se_mean);
    EXPECT_NEAR(var, target_var, 4.0 * se_var);
}

TEST(SamplePrehistory, RejectsNonnegativeTimes) {
    EXPECT_THROW(sample_prehistory(0.0, std::vector<double>{-1.0, 0.0}, 1),
                 std::domain_error);
    EXPECT_THROW(sample_prehistory(0.0, std::vector<double>{0.5}, 1), std::domain_error);
}

TEST(SamplePrehistory, ApproachesThetaZeroNearOrigin) {
    const std::vector<double> t{-1e-10};
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto v = sample_prehistory(3.0, t, seed);
        EXPECT_NEAR(v[0], 3.0, 1e-3);
    }
}

TEST(SamplePrehistory, BrownianMoments) {
    const std::vector<double> times{-1.0, -4.0};
    const std::size_t n = 100000;
    std::vector<double> y1(n);
    std::vector<double> y4(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto v = sample_prehistory(0.5, times, 555 + k);
        y1[k] = v[0] - 0.5;
        y4[k] = v[1] - 0.5;
    }
    auto sample_var = [n](const std::vector<double>& xs) {
        double mean = 0.0;
        for (double x : xs) {
            mean += x;
        }
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (double x : xs) {
            var += (x - mean) * (x - mean);
        }
        return var / static_cast<double>(n - 1);
    };
    const double se1 = 1.0 * std::sqrt(2.0 / static_cast<double>(n - 1));
    const double se4 = 4.0 * std::sqrt(2.0 / static_cast<double>(n - 1));
    EXPECT_NEAR(sample_var(y1), 1.0, 4.0 * se1);
    EXPECT_NEAR(sample_var(y4), 4.0, 4.0 * se4);
    // Cov(Y_{-s}, Y_{-t}) = min(-s, -t) = 1 for s = -1, t = -4.
    double cov = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        cov += y1[k] * y4[k];
    }
    cov /= static_cast<double>(n - 1);
    EXPECT_NEAR(cov, 1.0, 0.1);
}

TEST(PosteriorGivenReport, CurrentStateReport) {
    const auto m = posterior_given_report(1.7, ReportTime::at(2.0), 2.0, kFig2);
    EXPECT_DOUBLE_EQ(m.mean, 1.7);
    EXPECT_DOUBLE_EQ(m.variance, 0.0);
}

TEST(PosteriorGivenReport, NoInformation) {
    const auto p = make_params(-0.5, 2.0, 3.0, 1.2, 2.0);
    const auto m = posterior_given_report(99.0, ReportTime::minus_infinity(), 0.0, p);
    EXPECT_DOUBLE_EQ(m.mean, 1.2);
    EXPECT_DOUBLE_EQ(m.variance, 2.0);
}

TEST(PosteriorGivenReport, ConjugatePrehistoryUpdate) {
    const auto p = make_params(0.0, 2.0, 3.0, 0.0, 3.0);
    const auto m = posterior_given_report(1.0, ReportTime::at(-19.5), 0.1, p);
    EXPECT_NEAR(m.variance, 3.0, 1e-12);
    // Posterior mean of theta_0: mu0 + [sigma0^2/(sigma0^2 - phi)](x - mu0).
    EXPECT_NEAR(m.mean, 3.0 / 22.5, 1e-12);
}

TEST(PosteriorGivenReport, RejectsFutureReports) {
    EXPECT_THROW(posterior_given_report(0.0, ReportTime::at(1.5), 1.0, kFig2),
                 std::domain_error);
}

TEST(PosteriorGivenReport, VarianceContinuousAcrossZero) {
    const auto p = make_params(-0.3, 1.5, 2.0, 0.4, 2.0);
    const double t = 0.8;
    const double left = posterior_variance(ReportTime::at(-1e-12), t, p);
    const double right = posterior_variance(ReportTime::at(0.0), t, p);
    EXPECT_NEAR(left, right, 1e-9);
}

TEST(PosteriorGivenReport, PrehistoryRegressionMonteCarlo) {
    // Regress theta_t on the pre-history report and compare the residual
    // variance with the conjugate-update formula.
    const auto p = make_params(0.0, 2.0, 3.0, 0.0, 3.0);
    const double phi = -19.5;
    const double t = 0.1;
    const std::size_t n = 200000;
    std::mt19937_64 gen(2024);
    std::normal_distribution<double> normal(0.0, 1.0);
    double resid_sq = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double theta0 = std::sqrt(3.0) * normal(gen);
        const double report = theta0 + std::sqrt(-phi) * normal(gen);
        const double theta_t = theta0 + 2.0 * std::sqrt(t) * normal(gen);
        const double pred = posterior_given_report(report, ReportTime::at(phi), t, p).mean;
        resid_sq += (theta_t - pred) * (theta_t - pred);
    }
    const double mc_var = resid_sq / static_cast<double>(n);
    const double se = 3.0 * std::sqrt(2.0 / static_cast<double>(n));
    EXPECT_NEAR(mc_var, 3.0, 4.0 * se);
}

TEST(ReportTime, SentinelBehaviour) {
    const ReportTime inf = ReportTime::minus_infinity();
    EXPECT_TRUE(inf.is_minus_infinity());
    EXPECT_THROW(inf.value(), std::domain_error);
    const ReportTime at = ReportTime::at(-2.5);
    EXPECT_FALSE(at.is_minus_infinity());
    EXPECT_DOUBLE_EQ(at.value(), -2.5);
    EXPECT_THROW(ReportTime::at(std::numeric_limits<double>::infinity()),
                 std::domain_error);
}
