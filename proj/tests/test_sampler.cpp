#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numeric>

#include "test_util.hpp"
#include "tumorfa/density.hpp"
#include "tumorfa/diagnostics.hpp"
#include "tumorfa/sampler.hpp"
#include "tumorfa/simgen.hpp"

using namespace tumorfa;
using tumorfa::testing::binom_pmf;
using tumorfa::testing::column_prior;
using tumorfa::testing::make_data;
using tumorfa::testing::make_state;

namespace {

TrainTestSplit any_split(std::size_t S, std::size_t T) {
  Rng rng(99);
  return draw_split(S, T, 25.0, 975.0, rng);
}

double ks_statistic(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double F = cdf(x[i]);
    d = std::max({d, F - i / n, (i + 1) / n - F});
  }
  return d;
}

}  // namespace

TEST(Split, MeanMatchesBetaShapes) {
  Rng rng(1);
  const auto split = draw_split(1000, 100, 25.0, 975.0, rng);
  double sum = 0.0, sum2 = 0.0;
  for (double b : split.b.raw()) {
    sum += b;
    sum2 += b * b;
  }
  const double n = static_cast<double>(split.b.size());
  const double mean = sum / n, se = std::sqrt((sum2 / n - mean * mean) / n);
  EXPECT_NEAR(mean, 0.025, 3.0 * se);

  const auto sym = draw_split(300, 300, 4.0, 4.0, rng);
  double m2 = 0.0;
  for (double b : sym.b.raw()) m2 += b;
  EXPECT_NEAR(m2 / static_cast<double>(sym.b.size()), 0.5, 0.005);
}

TEST(Split, DeterministicGivenSeed) {
  Rng a(17), b(17);
  EXPECT_EQ(draw_split(20, 7, 25.0, 975.0, a).b, draw_split(20, 7, 25.0, 975.0, b).b);
  EXPECT_THROW(draw_split(2, 2, 0.0, 1.0, a), std::invalid_argument);
}

TEST(GibbsZ, NoDataGivesPriorPredictive) {
  const std::size_t S = 4;
  const int C = 2;
  Hyperparams hp;
  hp.alpha = 3.0;
  const auto data = make_data(S, 2, 0, 0);
  const auto split = any_split(S, 2);
  BinaryMatrix Z(S, C, 0);
  Z(1, 0) = Z(3, 0) = 1;  // two ones besides row 0
  const auto st = make_state(Z, RealMatrix(2, C + 1, 1.0), 0.01);
  Rng rng(4);
  const int draws = 40000;
  int ones = 0;
  for (int i = 0; i < draws; ++i) ones += gibbs_update_z(st, data, split, hp, 0, 0, rng).Z(0, 0);
  const double g = hp.alpha / C;
  const double expected = (g + 2.0) / (S + g);
  EXPECT_NEAR(ones / static_cast<double>(draws), expected, 3.0 * std::sqrt(expected * (1 - expected) / draws));
}

TEST(GibbsZ, OverwhelmingDataSelectsInclusion) {
  Hyperparams hp;
  const auto data = make_data(1, 1, 1000000, 1000000);
  RealMatrix theta(1, 2);
  theta(0, 0) = 0.001;
  theta(0, 1) = 1.0;
  const auto st = make_state(BinaryMatrix(1, 1, 0), theta, 0.01);
  Rng rng(5);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(gibbs_update_z(st, data, any_split(1, 1), hp, 0, 0, rng).Z(0, 0), 1);
}

TEST(GibbsZ, TwoStateToyMatchesEnumeration) {
  Hyperparams hp;
  hp.alpha = 3.0;
  const auto data = make_data(1, 1, 3, 10);
  const auto st = make_state(BinaryMatrix(1, 1, 0), RealMatrix(1, 2, 1.0), 0.05);
  // Both states by hand: p = 0.525 with the SNV, 0.025 without.
  const double w1 = column_prior(1, 1, hp.alpha, 1) * binom_pmf(3, 10, 0.525);
  const double w0 = column_prior(0, 1, hp.alpha, 1) * binom_pmf(3, 10, 0.025);
  const double exact = w1 / (w0 + w1);
  Rng rng(6);
  const int draws = 40000;
  int ones = 0;
  for (int i = 0; i < draws; ++i) ones += gibbs_update_z(st, data, any_split(1, 1), hp, 0, 0, rng).Z(0, 0);
  EXPECT_NEAR(ones / static_cast<double>(draws), exact, 3.0 * std::sqrt(exact * (1 - exact) / draws));
}

TEST(RowMove, IdentityProposalIsAccepted) {
  Hyperparams hp;
  McmcConfig cfg;
  const auto data = make_data(3, 2, 4, 10);
  PreparedData prepared(data, any_split(3, 2));
  BinaryMatrix Z(3, 2, 0);
  Z(0, 1) = 1;
  StateSampler sampler(prepared, hp, cfg, make_state(Z, RealMatrix(2, 3, 1.0), 0.02));
  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    EXPECT_TRUE(sampler.mh_update_row(i % 3, rng, 0.0));
    EXPECT_EQ(sampler.state().Z, Z);
  }
}

TEST(RowMove, DetailedBalanceOnFourStates) {
  Hyperparams hp;
  hp.alpha = 2.0;
  McmcConfig cfg;
  const double flip = 0.3;
  const auto data = make_data(1, 1, 4, 10);
  PreparedData prepared(data, any_split(1, 1));
  RealMatrix theta(1, 3);
  theta(0, 0) = 1.0;
  theta(0, 1) = 2.0;
  theta(0, 2) = 0.5;
  const double p0 = 0.05;

  // Exact stationary law over rows (z1, z2), encoded as z1 + 2 z2.
  std::array<double, 4> pi{};
  for (int x = 0; x < 4; ++x) {
    const int z1 = x & 1, z2 = x >> 1;
    const double p = (1.0 * p0 + 2.0 * z1 + 0.5 * z2) / 3.5;
    pi[x] = column_prior(z1, 1, hp.alpha, 2) * column_prior(z2, 1, hp.alpha, 2) * binom_pmf(4, 10, p);
  }
  const double Zn = pi[0] + pi[1] + pi[2] + pi[3];
  for (double& v : pi) v /= Zn;
  auto flow = [&](int x, int y) {
    const int h = __builtin_popcount(x ^ y);
    const double q = std::pow(flip, h) * std::pow(1 - flip, 2 - h);
    return pi[x] * q * std::min(1.0, pi[y] / pi[x]);
  };

  StateSampler sampler(prepared, hp, cfg, make_state(BinaryMatrix(1, 2, 0), theta, p0));
  Rng rng(8);
  const int steps = 400000;
  std::array<std::array<std::vector<double>, 4>, 4> ind;
  for (auto& row : ind)
    for (auto& v : row) v.reserve(steps);
  int x = 0;
  for (int i = 0; i < steps; ++i) {
    sampler.mh_update_row(0, rng, flip);
    const int y = sampler.state().Z(0, 0) + 2 * sampler.state().Z(0, 1);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) ind[a][b].push_back(a == x && b == y ? 1.0 : 0.0);
    x = y;
  }
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      if (a == b) continue;
      const auto& v = ind[a][b];
      const double freq = std::accumulate(v.begin(), v.end(), 0.0) / steps;
      EXPECT_NEAR(freq, flow(a, b), 3.0 * batch_means_se(v)) << a << " -> " << b;
    }
  }
}

TEST(ThetaMove, VanishingStepIsAlwaysAccepted) {
  Hyperparams hp;
  McmcConfig cfg;
  cfg.theta_step = 1e-9;
  cfg.p0_step = 1e-9;
  const auto data = make_data(3, 2, 4, 10);
  PreparedData prepared(data, any_split(3, 2));
  StateSampler sampler(prepared, hp, cfg, make_state(BinaryMatrix(3, 2, 1), RealMatrix(2, 3, 0.7), 0.02));
  Rng rng(9);
  int acc = 0, p0_acc = 0;
  for (int i = 0; i < 2000; ++i) {
    acc += sampler.mh_update_theta(i % 2, i % 3, rng);
    p0_acc += sampler.mh_update_p0(rng);
  }
  EXPECT_GE(acc, 1995);
  EXPECT_GE(p0_acc, 1995);
}

TEST(ThetaMove, RecoversGammaPriorWithoutData) {
  Hyperparams hp;
  hp.a = 0.5;
  hp.a0 = 1.0;
  McmcConfig cfg;
  cfg.theta_step = 2.0;
  const auto data = make_data(2, 1, 0, 0);
  PreparedData prepared(data, any_split(2, 1));
  StateSampler sampler(prepared, hp, cfg, make_state(BinaryMatrix(2, 1, 1), RealMatrix(1, 2, 1.0), 0.01));
  Rng rng(10);
  std::vector<double> bg, hap;
  for (int i = 0; i < 200000; ++i) {
    sampler.mh_update_theta(0, 0, rng);
    sampler.mh_update_theta(0, 1, rng);
    if (i % 40 == 0) {
      bg.push_back(sampler.state().theta(0, 0));
      hap.push_back(sampler.state().theta(0, 1));
    }
  }
  const double crit = 1.949 / std::sqrt(static_cast<double>(bg.size()));  // KS at the 1e-3 level
  EXPECT_LT(ks_statistic(hap, [](double x) { return std::erf(std::sqrt(x)); }), crit);
  EXPECT_LT(ks_statistic(bg, [](double x) { return 1.0 - std::exp(-x); }), crit);
}

TEST(ThetaMove, OneCellPosteriorMatchesQuadrature) {
  Hyperparams hp;
  hp.a = hp.a0 = 1.0;  // w uniform a priori
  McmcConfig cfg;
  cfg.theta_step = 1.0;
  const double p0 = 0.05;
  const auto data = make_data(1, 1, 6, 10);
  PreparedData prepared(data, any_split(1, 1));
  StateSampler sampler(prepared, hp, cfg, make_state(BinaryMatrix(1, 1, 1), RealMatrix(1, 2, 1.0), p0));
  Rng rng(11);
  std::vector<double> w;
  for (int i = 0; i < 300000; ++i) {
    sampler.mh_update_theta(0, i % 2, rng);
    if (i % 10 == 0) {
      const auto& th = sampler.state().theta;
      w.push_back(th(0, 1) / (th(0, 0) + th(0, 1)));
    }
  }
  std::sort(w.begin(), w.end());

  // Posterior of w on a midpoint grid: density prop. to Binom(6; 10, p0 + (1 - p0) w).
  const int grid = 100000;
  std::vector<double> cdf(grid + 1, 0.0);
  for (int i = 0; i < grid; ++i) {
    const double x = (i + 0.5) / grid;
    cdf[i + 1] = cdf[i] + binom_pmf(6, 10, p0 + (1 - p0) * x);
  }
  for (double& c : cdf) c /= cdf.back();
  double worst = 0.0;
  for (int k = 1; k < 100; ++k) {
    const double x = k / 100.0;
    const double emp = static_cast<double>(std::upper_bound(w.begin(), w.end(), x) - w.begin()) / w.size();
    worst = std::max(worst, std::abs(emp - cdf[static_cast<std::size_t>(x * grid)]));
  }
  EXPECT_LT(worst, 0.02);
}

TEST(P0Move, RecoversBetaPriorWithoutData) {
  Hyperparams hp;
  McmcConfig cfg;
  cfg.p0_step = 1.0;
  const auto data = make_data(2, 2, 0, 0);
  PreparedData prepared(data, any_split(2, 2));
  StateSampler sampler(prepared, hp, cfg, make_state(BinaryMatrix(2, 1, 0), RealMatrix(2, 2, 1.0), 0.01));
  Rng rng(12);
  std::vector<double> p;
  for (int i = 0; i < 200000; ++i) {
    sampler.mh_update_p0(rng);
    if (i % 40 == 0) p.push_back(sampler.state().p0);
  }
  const double crit = 1.949 / std::sqrt(static_cast<double>(p.size()));
  EXPECT_LT(ks_statistic(p, [](double x) { return 1.0 - std::pow(1.0 - x, 100.0); }), crit);
}

TEST(RjMove, SingleSupportPointAlwaysAccepts) {
  Hyperparams hp;
  hp.c_max = 1;
  McmcConfig cfg;
  cfg.rj_anneal_steps = 3;
  cfg.rj_inner_iters = 2;
  const auto data = make_data(3, 2, 0, 0);
  PreparedData prepared(data, any_split(3, 2));
  StateSampler chain(prepared, hp, cfg, make_state(BinaryMatrix(3, 1, 1), RealMatrix(2, 2, 1.0), 0.01));
  Rng rng(13);
  for (int i = 0; i < 20; ++i) {
    const auto out = rj_move(chain, prepared, hp, cfg, rng);
    EXPECT_EQ(out.proposed_C, 1);
    EXPECT_TRUE(out.accepted);
    EXPECT_FALSE(out.failed);
    EXPECT_EQ(chain.C(), 1);
  }
}

TEST(RjMove, ProposesNeighbouringC) {
  Hyperparams hp;
  McmcConfig cfg;
  cfg.rj_anneal_steps = 2;
  cfg.rj_inner_iters = 1;
  const auto data = make_data(3, 2, 0, 0);
  PreparedData prepared(data, any_split(3, 2));
  Rng rng(14);
  StateSampler chain(prepared, hp, cfg, initialize_state(data, 3, hp, rng));
  for (int i = 0; i < 30; ++i) {
    const int before = chain.C();
    const auto out = rj_move(chain, prepared, hp, cfg, rng);
    EXPECT_EQ(std::abs(out.proposed_C - before), out.proposed_C == before ? 0 : 1);
    EXPECT_EQ(chain.C(), out.accepted ? out.proposed_C : before);
  }
}

TEST(AnnealSchedule, EndpointsAndGeometricSpacing) {
  EXPECT_EQ(anneal_schedule(1, 0.025), (std::vector<double>{0.0, 1.0}));
  const double b = 0.025;
  const auto betas = anneal_schedule(10, b);
  ASSERT_EQ(betas.size(), 11u);
  for (std::size_t k = 1; k < betas.size(); ++k) EXPECT_GT(betas[k], betas[k - 1]);
  const double ratio = (b + betas[1] * (1 - b)) / b;
  for (std::size_t k = 1; k < betas.size(); ++k) {
    EXPECT_NEAR((b + betas[k] * (1 - b)) / (b + betas[k - 1] * (1 - b)), ratio, 1e-9);
  }
}

TEST(Initialization, ZeroCountsGiveEmptyZ) {
  Hyperparams hp;
  Rng rng(15);
  const auto st = initialize_state(make_data(6, 3, 0, 20), 3, hp, rng);
  for (auto z : st.Z.raw()) EXPECT_EQ(z, 0);
}

TEST(Initialization, ZDependsOnlyOnData) {
  Hyperparams hp;
  Rng sim(16);
  SimulationOptions opts;
  opts.S = 40;
  opts.T = 5;
  const auto data = simulate_counts(make_paper_truth(opts, sim), sim);
  Rng a(1), b(2);
  const auto x = initialize_state(data, 4, hp, a), y = initialize_state(data, 4, hp, b);
  EXPECT_EQ(x.Z, y.Z);
  EXPECT_NE(x.theta, y.theta);
  for (std::size_t s = 0; s < 40; ++s)
    for (int c = 1; c < 4; ++c) EXPECT_LE(x.Z(s, c), x.Z(s, c - 1));
}

TEST(StateSampler, CachesAgreeWithDirectEvaluation) {
  Hyperparams hp;
  McmcConfig cfg;
  Rng sim(17);
  SimulationOptions opts;
  opts.S = 30;
  opts.T = 4;
  const auto data = simulate_counts(make_paper_truth(opts, sim), sim);
  PreparedData prepared(data, any_split(30, 4));
  Rng rng(18);
  StateSampler sampler(prepared, hp, cfg, initialize_state(data, 3, hp, rng));
  for (int i = 0; i < 200; ++i) sampler.sweep(rng, i % 2 == 1);
  const double direct = log_joint(data, sampler.state(), hp);
  EXPECT_NEAR(sampler.log_joint(), direct, 1e-8 * std::abs(direct));
  EXPECT_NEAR(sampler.log_likelihood_train() + sampler.log_likelihood_test(), sampler.log_likelihood_full(),
              1e-9 * std::abs(direct));
  EXPECT_NEAR(sampler.log_likelihood_full(), log_likelihood(data, sampler.state()), 1e-8 * std::abs(direct));
}

TEST(RunChain, SameSeedSameTrace) {
  Hyperparams hp;
  McmcConfig cfg;
  cfg.iterations = 300;
  cfg.burn_in = 50;
  cfg.thin = 5;
  cfg.rj_prob = 0.2;
  cfg.rj_anneal_steps = 5;
  cfg.rj_inner_iters = 5;
  Rng sim(19);
  SimulationOptions opts;
  opts.S = 12;
  opts.T = 3;
  const auto data = simulate_counts(make_paper_truth(opts, sim), sim);
  const Trace a = run_chain(data, hp, cfg), b = run_chain(data, hp, cfg);
  ASSERT_EQ(a.scalars.size(), b.scalars.size());
  for (std::size_t i = 0; i < a.scalars.size(); ++i) {
    EXPECT_EQ(a.scalars[i].C, b.scalars[i].C);
    EXPECT_EQ(a.scalars[i].log_joint, b.scalars[i].log_joint);
    EXPECT_EQ(a.scalars[i].p0, b.scalars[i].p0);
    EXPECT_EQ(a.scalars[i].rj_accepted, b.scalars[i].rj_accepted);
  }
  EXPECT_EQ(a.states, b.states);
  EXPECT_EQ(a.scalars.size(), 250u);
  EXPECT_EQ(a.states.size(), 50u);
  int attempts = 0;
  for (const auto& r : a.scalars) attempts += r.rj_attempted;
  EXPECT_GT(attempts, 0);
}

TEST(RunChain, NonFiniteStartIsAnInitializationError) {
  Hyperparams hp;
  McmcConfig cfg;
  cfg.iterations = 10;
  cfg.burn_in = 0;
  const auto data = make_data(2, 1, 5, 5);
  // theta_t0 p0 underflows to 0 while every read is a variant.
  RealMatrix theta(1, 2, 1.0);
  theta(0, 0) = 1e-300;
  auto st = make_state(BinaryMatrix(2, 1, 0), theta, 1e-100);
  EXPECT_THROW(run_chain(data, hp, cfg, st), InitializationError);
}

TEST(RunChain, SimulationStudyShortRun) {
  Hyperparams hp = Hyperparams::simulation_preset();
  McmcConfig cfg;
  cfg.iterations = 400;
  cfg.burn_in = 200;
  cfg.enable_rj = false;
  cfg.init_C = 4;
  Rng sim(20);
  const auto data = simulate_counts(make_paper_truth(SimulationOptions{}, sim), sim);
  Rng rng(21);
  EXPECT_TRUE(std::isfinite(log_joint(data, initialize_state(data, 4, hp, rng), hp)));
  const Trace trace = run_chain(data, hp, cfg);
  const auto d = diagnose(trace);
  EXPECT_GT(d.row_accept_rate, 0.05);
  EXPECT_LT(d.row_accept_rate, 0.8);
  double p0 = 0.0;
  for (const auto& r : trace.scalars) p0 += r.p0;
  EXPECT_LT(p0 / trace.scalars.size(), 0.05);
}
