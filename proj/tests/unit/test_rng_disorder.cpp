#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "rffkim/disorder.hpp"
#include "rffkim/errors.hpp"
#include "rffkim/rng.hpp"

using namespace rffkim;

TEST(Philox, KnownAnswerVectors) {
  using A4 = std::array<std::uint32_t, 4>;
  EXPECT_EQ(philox4x32({0, 0, 0, 0}, {0, 0}), (A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(NormalQuantile, MatchesReferenceValues) {
  EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-15);
  EXPECT_NEAR(normal_quantile(0.001), -3.090232306167813, 1e-14);
  EXPECT_NEAR(normal_quantile(1e-10), -6.361340902404056, 1e-13);
  EXPECT_NEAR(normal_quantile(0.3), -0.5244005127080409, 1e-15);
  EXPECT_NEAR(normal_quantile(0.9), 1.2815515655446004, 1e-15);
  EXPECT_NEAR(normal_quantile(1e-300), -37.0470962993612, 1e-11);
  EXPECT_NEAR(normal_quantile(0.02425), -1.972961051311885, 1e-14);
  EXPECT_EQ(normal_quantile(0.5), 0.0);
}

TEST(CounterRng, StreamsAreDeterministicAndDistinct) {
  CounterRng a(42, streams::kChain), b(42, streams::kChain), c(42, streams::kChain + 1);
  for (int i = 0; i < 10; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
  }
  EXPECT_GT(open_unit(0), 0.0);
  EXPECT_LT(open_unit(~std::uint64_t{0}), 1.0);
}

TEST(Disorder, MomentsOfAMillionValues) {
  const int n = 1'000'000;
  double s = 0.0, s2 = 0.0;
  for (int v = 0; v < n; ++v) {
    const double h = field_value(2024, static_cast<std::uint64_t>(v));
    s += h;
    s2 += h * h;
  }
  const double m = s / n;
  const double var = s2 / n - m * m;
  EXPECT_LT(std::fabs(m), 4.0 / std::sqrt(static_cast<double>(n)));
  EXPECT_GE(var, 0.99);
  EXPECT_LE(var, 1.01);
}

TEST(Disorder, EqualSeedsGiveIdenticalFields) {
  const auto g = LatticeGraph::box(4);
  const auto a = sample_field(g, 7, 0.3), b = sample_field(g, 7, 0.3), c = sample_field(g, 8, 0.3);
  EXPECT_EQ(a.values, b.values);
  EXPECT_NE(a.values, c.values);
}

TEST(Disorder, GrowingTheGraphKeepsExistingIndices) {
  // values depend on (seed, index) only
  const auto small = sample_field(LatticeGraph::box(2), 5);
  const auto large = sample_field(LatticeGraph::box(5), 5);
  for (std::size_t v = 0; v < small.size(); ++v) EXPECT_EQ(small.values[v], large.values[v]);
}

TEST(Disorder, FieldSum) {
  const auto g = LatticeGraph::box(2);
  const auto f = sample_field(g, 3);
  EXPECT_EQ(field_sum(f, std::vector<int>{}), 0.0);
  EXPECT_EQ(field_sum(f, std::vector<int>{4}), f.values[4]);
  const std::vector<int> a{0, 2, 5}, b{7, 11}, ab{0, 2, 5, 7, 11};
  EXPECT_NEAR(field_sum(f, ab), field_sum(f, a) + field_sum(f, b), 1e-15);
  EXPECT_THROW(field_sum(f, std::vector<int>{99}), InvalidParameter);
}

TEST(Disorder, EpsilonSchedule) {
  EXPECT_DOUBLE_EQ(epsilon_schedule(16, 1.0, 1.0), 0.0625);
  EXPECT_NEAR(epsilon_schedule(16, 1.0, 15.0 / 16.0), 0.074325444687670, 1e-12);
  EXPECT_DOUBLE_EQ(epsilon_schedule(16, 1.0, 0.5), 0.25);
}

TEST(Disorder, CriticalConstants) {
  EXPECT_NEAR(constants::kCriticalP, 2.0 - std::sqrt(2.0), 2e-16);
  EXPECT_NEAR(constants::kCriticalP, std::sqrt(2.0) / (1.0 + std::sqrt(2.0)), 2e-16);
  EXPECT_NEAR(constants::kCriticalT, 2.0 / std::log(1.0 + std::sqrt(2.0)), 1e-15);
  EXPECT_NEAR(Coupling::critical().p(), constants::kCriticalP, 1e-15);
  EXPECT_NEAR(Coupling::from_p(0.3).temperature(), -2.0 / std::log(0.7), 1e-14);
  EXPECT_THROW(Coupling::from_p(1.0), InvalidParameter);
  EXPECT_THROW(Coupling::from_temperature(0.0), InvalidParameter);
}

TEST(Disorder, RegimeTable) {
  const double tc = constants::kCriticalT;
  EXPECT_EQ(alpha_exponent(1.0), 1.0);
  EXPECT_EQ(alpha_exponent(tc), 15.0 / 16.0);
  EXPECT_EQ(alpha_exponent(tc * (1 + 1e-13)), 15.0 / 16.0);
  EXPECT_EQ(alpha_exponent(tc * (1 + 1e-10)), 0.5);
  EXPECT_EQ(alpha_exponent(3.0), 0.5);
  EXPECT_EQ(beta_exponent(1.0), 1.0);
  EXPECT_EQ(beta_exponent(tc), 7.0 / 8.0);
  EXPECT_EQ(beta_exponent(3.0), 0.5);
}

TEST(Disorder, CsvRoundTrip) {
  const auto g = LatticeGraph::box(2);
  const auto f = sample_field(g, 9, 0.4);
  std::stringstream ss;
  write_field_csv(ss, g, f);
  const auto back = read_field_csv(ss, g, 0.4);
  EXPECT_EQ(back.values, f.values);
  std::stringstream bad("vertex,x,y,h\n");
  EXPECT_THROW(read_field_csv(bad, g, 0.4), SchemaError);
}
