#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "ergolab/oracle.hpp"
#include "ergolab/rng.hpp"
#include "ergolab/stats.hpp"

using namespace ergolab;

namespace {
const Polynomial kGauss{0.0, 0.0, 0.5};
const Polynomial kQuartic{0.0, 0.0, 0.0, 0.0, 0.25};
}  // namespace

TEST(Quadrature, RulesIntegratePolynomialsAndGaussian) {
    EXPECT_NEAR(simpson([](double x) { return x * x * x; }, 0.0, 2.0, 3), 4.0, 1e-14);
    EXPECT_NEAR(midpoint([](double x) { return x; }, 0.0, 2.0, 1), 2.0, 1e-14);
    EXPECT_THROW(simpson([](double) { return 1.0; }, 0.0, 1.0, 4), ParameterError);
}

TEST(Oracle, GaussianNormalizer) {
    const auto o = InvariantOracle1D::build(kGauss, 1.0, {-12.0, 12.0, 48001});
    EXPECT_NEAR(o.normalizer(), std::sqrt(2.0 * std::numbers::pi), 1e-7);
    EXPECT_NEAR(o.normalizer_midpoint(), std::sqrt(2.0 * std::numbers::pi), 1e-7);
}

TEST(Oracle, GaussianMoments) {
    const auto o = InvariantOracle1D::build(kGauss, 1.0);
    EXPECT_NEAR(o.expectation([](double x) { return x * x; }), 1.0, 1e-9);
    EXPECT_NEAR(o.expectation([](double x) { return x; }), 0.0, 1e-12);
    EXPECT_NEAR(o.expectation_widening([](double x) { return x * x * x * x; }), 3.0, 1e-8);
}

TEST(Oracle, QuarticNormalizerMatchesGammaFunction) {
    // int exp(-x^4/4) dx = 2 * 4^{1/4} * Gamma(5/4)
    const double exact = 2.0 * std::pow(4.0, 0.25) * std::tgamma(1.25);
    const auto o = InvariantOracle1D::build(kQuartic, 1.0);
    EXPECT_NEAR(o.normalizer(), exact, 1e-8);
    EXPECT_NEAR(o.normalizer_midpoint(), exact, 1e-8);
    // E[x^2] = 4^{1/2} Gamma(3/4) / Gamma(1/4)
    const double m2 = 2.0 * std::tgamma(0.75) / std::tgamma(0.25);
    EXPECT_NEAR(o.expectation([](double x) { return x * x; }), m2, 1e-9);
    EXPECT_NEAR(o.expectation_midpoint([](double x) { return x * x; }), m2, 1e-8);
}

TEST(Oracle, TemperatureAndShiftedMinimum) {
    // U = (x-1)^2 / 2 + 7 with eps = 2 is N(1, 2)
    const Polynomial u{7.5, -1.0, 0.5};
    const auto o = InvariantOracle1D::build(u, 2.0);
    EXPECT_NEAR(o.expectation([](double x) { return x; }), 1.0, 1e-9);
    EXPECT_NEAR(o.expectation([](double x) { return (x - 1.0) * (x - 1.0); }), 2.0, 1e-9);
    EXPECT_NEAR(o.normalizer(), std::sqrt(4.0 * std::numbers::pi) * std::exp(-7.0 / 2.0), 1e-9);
}

TEST(Oracle, AutoGridIsSymmetricAndDecays) {
    const auto g = auto_grid(kQuartic, 1.0);
    EXPECT_DOUBLE_EQ(g.x_min, -g.x_max);
    EXPECT_NEAR(std::pow(g.x_max, 4) / 4.0, 40.0, 1e-6);
    EXPECT_THROW(auto_grid(Polynomial{0.0, 0.0, -1.0}, 1.0), GridError);
}

TEST(Oracle, NarrowGridIsRejected) {
    EXPECT_THROW(InvariantOracle1D::build(kGauss, 1.0, {-3.0, 3.0, 1001}), GridError);
    EXPECT_THROW(InvariantOracle1D::build(kGauss, 1.0, {-3.0, 3.0, 1000}), GridError);
    const auto o = InvariantOracle1D::build(kGauss, 1.0, {-9.0, 9.0, 20001});
    EXPECT_THROW(o.expectation([](double x) { return std::exp(0.6 * x * x); }), GridError);
}

TEST(Oracle, CdfAndQuantile) {
    const auto o = InvariantOracle1D::build(kGauss, 1.0);
    EXPECT_NEAR(o.quantile(0.5), 0.0, 1e-6);
    EXPECT_NEAR(o.cdf(0.0), 0.5, 1e-9);
    EXPECT_NEAR(o.cdf(1.0), 0.5 * std::erfc(-1.0 / std::sqrt(2.0)), 1e-7);
    EXPECT_NEAR(o.quantile(o.cdf(0.7)), 0.7, 1e-6);
}

TEST(Oracle, StationarySamplesHaveUnitVariance) {
    const auto o = InvariantOracle1D::build(kGauss, 1.0);
    const auto xs = o.sample_stationary_many(BrownianDriver{9, 0, 1}, 100'000);
    const double sd = stats::stddev(xs);
    EXPECT_NEAR(sd * sd, 1.0, 0.02);
    EXPECT_NEAR(stats::mean(xs), 0.0, 0.02);
}

TEST(Oracle, TailVerdicts) {
    const auto o = InvariantOracle1D::build(kGauss, 1.0);
    const double r = o.grid().x_max;
    EXPECT_EQ(o.tail_verdict([](double x) { return x * x; }, 2 * r, 4 * r), TailVerdict::finite);
    EXPECT_EQ(o.tail_verdict([](double x) { return std::exp(x * x); }, 2 * r, 4 * r), TailVerdict::divergent);
    EXPECT_THROW(o.tail_verdict([](double) { return 1.0; }, 2.0, 1.0), ParameterError);
    EXPECT_STREQ(to_string(TailVerdict::inconclusive), "inconclusive");
}
