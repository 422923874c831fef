#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "tumorfa/diagnostics.hpp"

using namespace tumorfa;

namespace {

std::vector<double> ar1(std::size_t n, double phi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> eps(0.0, 1.0);
  std::vector<double> x(n);
  double v = 0.0;
  for (auto& e : x) e = v = phi * v + eps(rng);
  return x;
}

}  // namespace

TEST(Diagnostics, IidSeries) {
  const auto x = ar1(40000, 0.0, 1);
  EXPECT_NEAR(batch_means_se(x), 1.0 / std::sqrt(40000.0), 0.25 / std::sqrt(40000.0));
  EXPECT_NEAR(effective_sample_size(x), 40000.0, 4000.0);
  EXPECT_LT(std::abs(geweke_z(x)), 3.0);
}

TEST(Diagnostics, AutocorrelatedSeries) {
  const double phi = 0.9;
  const auto x = ar1(200000, phi, 2);
  const double ess = 200000.0 * (1 - phi) / (1 + phi);
  EXPECT_NEAR(effective_sample_size(x), ess, 0.15 * ess);
  // Long-run sd of the mean: 1 / (1 - phi) per step.
  const double se = 1.0 / (1 - phi) / std::sqrt(200000.0);
  EXPECT_NEAR(batch_means_se(x), se, 0.25 * se);
}

TEST(Diagnostics, GewekeFlagsDrift) {
  auto x = ar1(20000, 0.5, 3);
  for (std::size_t i = 0; i < 2000; ++i) x[i] += 3.0;
  EXPECT_GT(std::abs(geweke_z(x)), 5.0);
}

TEST(Diagnostics, ConstantSeries) {
  const std::vector<double> x(100, 4.0);
  EXPECT_EQ(geweke_z(x), 0.0);
  EXPECT_EQ(effective_sample_size(x), 100.0);
  EXPECT_EQ(batch_means_se(x), 0.0);
}

TEST(Diagnostics, ChainSummary) {
  Trace tr;
  for (int i = 0; i < 100; ++i) {
    ScalarRecord r;
    r.iteration = i;
    r.C = 3 + i % 2;
    r.row_accept_rate = i % 2 ? 0.5 : -1.0;
    r.theta_accept_rate = 0.25;
    r.p0_accepted = i % 4 == 0;
    r.rj_attempted = i % 10 == 0;
    r.rj_accepted = i % 20 == 0;
    tr.scalars.push_back(r);
  }
  const auto d = diagnose(tr);
  EXPECT_EQ(d.iterations, 100u);
  EXPECT_DOUBLE_EQ(d.row_accept_rate, 0.5);
  EXPECT_DOUBLE_EQ(d.theta_accept_rate, 0.25);
  EXPECT_DOUBLE_EQ(d.p0_accept_rate, 0.25);
  EXPECT_EQ(d.rj_attempts, 10);
  EXPECT_EQ(d.rj_accepts, 5);
  ASSERT_EQ(d.series.size(), 4u);
  EXPECT_EQ(d.series[0].name, "C");
  EXPECT_DOUBLE_EQ(d.series[0].mean, 3.5);
  EXPECT_THROW(diagnose(Trace{}), std::invalid_argument);
}
