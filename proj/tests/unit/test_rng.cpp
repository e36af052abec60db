#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "ergolab/rng.hpp"
#include "ergolab/stats.hpp"

using namespace ergolab;

// Known-answer vectors from the Random123 distribution (Philox4x32-10).
TEST(Philox, KnownAnswerVectors) {
    using P = Philox4x32;
    EXPECT_EQ(P::apply({0, 0, 0, 0}, {0, 0}), (P::counter_type{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(P::apply({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
              (P::counter_type{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(P::apply({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
              (P::counter_type{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, OpenUniformStaysInsideUnitInterval) {
    EXPECT_GT(detail::open_uniform(0), 0.0);
    EXPECT_LT(detail::open_uniform(~std::uint64_t{0}), 1.0);
}

TEST(BrownianDriver, RandomAccessMatchesSequentialStream) {
    const BrownianDriver d{7, 3, 1};
    NormalStream s(d);
    for (std::uint64_t i = 0; i < 100; ++i) EXPECT_EQ(s.next(), d.normal_at(i));
    NormalStream offset(d, Stream::increments, 37);
    EXPECT_EQ(offset.next(), d.normal_at(37));
    EXPECT_EQ(offset.next(), d.normal_at(38));
}

TEST(BrownianDriver, StreamsPathsAndSeedsAreDistinct) {
    const BrownianDriver d{1, 0, 1};
    std::set<double> seen;
    seen.insert(d.normal_at(0));
    seen.insert(d.normal_at(0, Stream::initial_state));
    seen.insert(d.normal_at(0, Stream::auxiliary));
    seen.insert(d.with_path(1).normal_at(0));
    seen.insert(BrownianDriver{2, 0, 1}.normal_at(0));
    EXPECT_EQ(seen.size(), 5u);
}

TEST(BrownianDriver, IncrementsHaveVarianceDt) {
    const BrownianDriver d{11, 0, 1};
    const double dt = 1e-3;
    const auto dw = increments(d, 200'000, dt);
    const double m = stats::mean(dw);
    const double sd = stats::stddev(dw);
    EXPECT_NEAR(m, 0.0, 4.0 * std::sqrt(dt / 200'000.0));
    EXPECT_NEAR(sd * sd / dt, 1.0, 0.01);
}

TEST(BrownianDriver, IncrementsResumeAtFirstStep) {
    const BrownianDriver d{5, 2, 2};
    const auto all = increments(d, 10, 0.01);
    const auto tail = increments(d, 4, 0.01, 6);
    for (std::size_t i = 0; i < tail.size(); ++i) EXPECT_EQ(tail[i], all[12 + i]);
}

TEST(BrownianDriver, UniformsAreUniform) {
    const BrownianDriver d{3, 0, 1};
    std::vector<double> u(100'000);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = d.uniform_at(i);
    EXPECT_NEAR(stats::mean(u), 0.5, 0.005);
    EXPECT_NEAR(stats::fraction_at_most(u, 0.25), 0.25, 0.005);
}
