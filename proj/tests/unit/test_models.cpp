#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "ergolab/hypotheses.hpp"
#include "ergolab/models.hpp"
#include "ergolab/oracle.hpp"

using namespace ergolab;

TEST(Polynomial, EvaluationAndCalculus) {
    const Polynomial p{1.0, -2.0, 0.0, 0.25};  // 1 - 2x + x^3/4
    EXPECT_EQ(p.degree(), 3u);
    EXPECT_DOUBLE_EQ(p(2.0), 1.0 - 4.0 + 2.0);
    EXPECT_EQ(p.derivative(), (Polynomial{-2.0, 0.0, 0.75}));
    EXPECT_EQ(p.antiderivative().derivative(), p);
    EXPECT_EQ((Polynomial{1.0, 0.0, 0.0}).degree(), 0u);
    EXPECT_TRUE(Polynomial{}.is_zero());
}

TEST(MakeOu, StandardParameters) {
    const auto m = make_ou(2.0, 0.0, 1.0);
    EXPECT_DOUBLE_EQ(m.drift(1.5), -1.5);
    EXPECT_DOUBLE_EQ(m.diffusion(0.3), std::sqrt(2.0));
    EXPECT_EQ(m.growth_exponent(), 1);
    // stationary variance sigma_diff^2 / lambda
    EXPECT_DOUBLE_EQ(m.diffusion(0.0) * m.diffusion(0.0) / 2.0, 1.0);
}

TEST(MakeOu, DriftVanishesAtMean) { EXPECT_DOUBLE_EQ(make_ou(2.0, 5.0, 1.0).drift(5.0), 0.0); }

TEST(MakeOu, StationaryVarianceScalesWithSigma) {
    const auto m = make_ou(1.0, 0.0, 2.0);
    EXPECT_DOUBLE_EQ(m.diffusion(0.0) * m.diffusion(0.0) / 1.0, 4.0);
}

TEST(MakeOu, DriftIsAffine) {
    const auto m = make_ou(3.0, 0.7, 1.3);
    for (double x : {-5.0, 0.0, 2.5})
        for (double h : {0.125, 1.0, 4.0}) EXPECT_NEAR(m.drift(x + h) - m.drift(x), -1.5 * h, 1e-12);
}

TEST(MakeOu, RejectsBadParameters) {
    EXPECT_THROW(make_ou(0.0, 0.0, 1.0), ParameterError);
    EXPECT_THROW(make_ou(1.0, 0.0, -1.0), ParameterError);
}

TEST(MakeLangevin, QuadraticIsOu) {
    const auto [m, lm] = make_langevin(Polynomial{0.0, 0.0, 0.5}, 1.0);
    EXPECT_DOUBLE_EQ(m.drift(2.0), -2.0);
    EXPECT_DOUBLE_EQ(m.diffusion(2.0), std::sqrt(2.0));
    EXPECT_EQ(lm.half_degree, 1);
}

TEST(MakeLangevin, QuarticEnvelopeConstant) {
    const auto [m, lm] = make_langevin(Polynomial{0.0, 0.0, 0.0, 0.0, 0.25}, 1.0);
    EXPECT_DOUBLE_EQ(m.drift(2.0), -8.0);
    EXPECT_EQ(m.growth_exponent(), 3);
    EXPECT_EQ(lm.half_degree, 2);
    EXPECT_NEAR(lm.envelope_constant(), std::sqrt(2.0), 1e-15);
}

TEST(MakeLangevin, RejectsOddDegreeAndNegativeLeading) {
    EXPECT_THROW(make_langevin(Polynomial{0.0, 0.0, 0.0, 1.0}, 1.0), ParameterError);
    EXPECT_THROW(make_langevin(Polynomial{0.0, 0.0, -1.0}, 1.0), ParameterError);
    EXPECT_THROW(make_langevin(Polynomial{0.0, 0.0, 1.0}, 0.0), ParameterError);
}

TEST(OuAsLangevin, MatchesOuDriftAndTemperature) {
    const auto [u, eps] = ou_as_langevin(2.0, 1.0, 1.5);
    const auto ou = make_ou(2.0, 1.0, 1.5);
    for (double x : {-2.0, 0.0, 3.0}) EXPECT_NEAR(-u.derivative()(x), ou.drift(x), 1e-12);
    EXPECT_NEAR(std::sqrt(2.0 * eps), ou.diffusion(0.0), 1e-12);
}

TEST(GrowthCheck, OuPassesAtLinearGrowth) {
    const std::vector<double> radii{1, 2, 4, 8, 16, 32, 64};
    const auto rep = growth_check(make_ou(2.0, 0.0, 1.0), radii);
    EXPECT_TRUE(rep.pass);
    EXPECT_LE(rep.c_hat, 1.0 + std::sqrt(2.0));
}

TEST(GrowthCheck, OuFailsAtZeroGrowth) {
    const std::vector<double> radii{1, 2, 4, 8, 16, 32, 64};
    EXPECT_FALSE(growth_check(make_ou(2.0, 0.0, 1.0).with_growth_exponent(0), radii).pass);
}

TEST(GrowthCheck, QuarticFailsAtLinearGrowthAndPassesAtCubic) {
    const std::vector<double> radii{1, 2, 4, 8, 16, 32, 64};
    const auto [m, lm] = make_langevin(Polynomial{0.0, 0.0, 0.0, 0.0, 0.25}, 1.0);
    EXPECT_FALSE(growth_check(m.with_growth_exponent(1), radii).pass);
    EXPECT_TRUE(growth_check(m, radii).pass);
}

TEST(GrowthCheck, ZeroModelHasZeroConstant) {
    const std::vector<double> radii{1, 10, 100};
    const auto rep = growth_check(make_zero_model(3, 1), radii, 16);
    EXPECT_EQ(rep.c_hat, 0.0);
    EXPECT_TRUE(rep.pass);
}

TEST(GrowthCheck, RejectsBadRadii) {
    const std::vector<double> one{1.0}, unordered{2.0, 1.0};
    EXPECT_THROW(growth_check(make_ou(2.0, 0.0, 1.0), one), ParameterError);
    EXPECT_THROW(growth_check(make_ou(2.0, 0.0, 1.0), unordered), ParameterError);
}

TEST(Lyapunov, QuadraticInHigherDimension) {
    const auto v = quadratic_lyapunov(0.3);
    const std::vector<double> x{1.0, 2.0, 2.0};
    EXPECT_DOUBLE_EQ(v(x), 4.5);
    std::vector<double> g(3), h(9);
    v.gradient(x, g);
    v.hessian(x, h);
    EXPECT_EQ(g, x);
    EXPECT_EQ(h[0] + h[4] + h[8], 3.0);
    EXPECT_EQ(h[1], 0.0);
}

TEST(Lyapunov, DeltaMustLieInsideUnitInterval) {
    EXPECT_THROW(quadratic_lyapunov(0.0), ParameterError);
    EXPECT_THROW(quadratic_lyapunov(1.0), ParameterError);
    EXPECT_THROW(quadratic_lyapunov(1.2), ParameterError);
}

TEST(Lyapunov, PositivityAndRadialMonotonicity) {
    const auto v = quadratic_lyapunov(0.2, 0.0, 1.0);
    const std::vector<std::vector<double>> probes{{1.0, 0.0}, {0.0, -3.0}, {0.5, 0.5}};
    EXPECT_TRUE(check_positive(v, probes).pass);
    const std::vector<double> radii{0.5, 1, 2, 4, 8};
    EXPECT_TRUE(check_radial_monotone(v, 2, radii, 32));

    LyapunovSpec bumpy = polynomial_lyapunov(Polynomial{1.0, 0.0, -1.0, 0.0, 0.05}, 0.2);  // dips near |x| = 3
    bumpy.mono_radius = 1.0;
    const std::vector<double> r1{1, 2, 3, 4, 5};
    EXPECT_FALSE(check_radial_monotone(bumpy, 1, r1));
}

TEST(Integrability, OuQuadraticThreshold) {
    const auto oracle = InvariantOracle1D::build(Polynomial{0.0, 0.0, 0.5}, 1.0);
    const auto v = quadratic_lyapunov(0.2);
    const std::vector<double> deltas{0.2, 0.5, 0.9, 1.5};
    const auto res = integrability_probe(v, oracle, deltas);
    ASSERT_EQ(res.size(), 4u);
    EXPECT_EQ(res[0].verdict, TailVerdict::finite);
    EXPECT_EQ(res[1].verdict, TailVerdict::finite);
    EXPECT_EQ(res[3].verdict, TailVerdict::divergent);
    // monotone in delta: once not finite, never finite again
    bool lost = false;
    for (const auto& r : res) {
        if (r.verdict != TailVerdict::finite) lost = true;
        else EXPECT_FALSE(lost);
    }
}
