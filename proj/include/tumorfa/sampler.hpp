#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tumorfa/types.hpp"

namespace tumorfa {

using Rng = std::mt19937_64;

/// Per-cell likelihood exponents b(s,t). The training share of cell (s,t)
/// is b(s,t), the test share 1 - b(s,t). Fixed for the lifetime of a fit.
struct TrainTestSplit {
  RealMatrix b;
};

TrainTestSplit draw_split(std::size_t S, std::size_t T, double shape1, double shape2, Rng& rng);

/// Sampler tuning knobs.
struct McmcConfig {
  int iterations = 25000;
  int burn_in = 10000;
  int thin = 10;
  double theta_step = 0.5;     // sd of the log-scale random walk on theta
  double p0_step = 0.5;        // sd of the logit-scale random walk on p0
  double row_flip_prob = 0.1;  // per-entry flip probability of the row proposal
  bool enable_rj = true;
  double rj_prob = 0.004;      // per-sweep probability of attempting a move in C
  int rj_inner_iters = 50;     // training-posterior sweeps that produce a proposal
  int rj_anneal_steps = 2000;  // bridge levels between training and full posterior; 1 = none
  double split_shape1 = 25.0;
  double split_shape2 = 975.0;
  int init_C = 0;              // 0: start at the prior mean 1/r
  std::uint64_t seed = 1;

  void validate() const;
};

/// Data in the form the kernels consume: counts as doubles, cached
/// binomial coefficients and the train/test split.
class PreparedData {
 public:
  PreparedData(const CountData& data, TrainTestSplit split);

  std::size_t S() const { return S_; }
  std::size_t T() const { return T_; }
  double n(std::size_t s, std::size_t t) const { return n_(s, t); }
  double N(std::size_t s, std::size_t t) const { return N_(s, t); }
  double log_choose(std::size_t s, std::size_t t) const { return log_choose_(s, t); }
  double b(std::size_t s, std::size_t t) const { return split_.b(s, t); }
  const CountData& counts() const { return *counts_; }
  const TrainTestSplit& split() const { return split_; }

 private:
  const CountData* counts_;
  std::size_t S_;
  std::size_t T_;
  RealMatrix n_;
  RealMatrix N_;
  RealMatrix log_choose_;
  TrainTestSplit split_;
};

enum class SweepOrder { kForward, kReverse };

/// Acceptance counts for one sweep.
struct SweepStats {
  int row_proposals = 0;
  int row_accepts = 0;
  int theta_proposals = 0;
  int theta_accepts = 0;
  bool p0_accepted = false;
};

/// Holds one ModelState together with the per-cell success/failure masses
///   hit(s,t)  = theta_t0 p0       + sum_c theta_tc z_sc
///   miss(s,t) = theta_t0 (1 - p0) + sum_c theta_tc (1 - z_sc)
/// so that p_st = hit / (hit + miss) and every single-coordinate update is
/// O(S) or O(T).
///
/// The kernels target p(x | C) * prod_st Binom(n_st; N_st, p_st)^e_st with
/// e_st = b_st + beta (1 - b_st). beta = 0 is the training posterior,
/// beta = 1 the full posterior.
class StateSampler {
 public:
  StateSampler(const PreparedData& data, const Hyperparams& hp, const McmcConfig& cfg,
               ModelState state, double beta = 1.0);

  const ModelState& state() const { return state_; }
  int C() const { return state_.C; }
  double beta() const { return beta_; }
  void set_beta(double beta);

  /// Resamples z_sc from its full conditional. Returns the new value.
  int gibbs_update_z(std::size_t s, std::size_t c, Rng& rng);
  /// Symmetric flip proposal on row s; flip_prob defaults to the config.
  bool mh_update_row(std::size_t s, Rng& rng, std::optional<double> flip_prob = std::nullopt);
  bool mh_update_theta(std::size_t t, std::size_t c, Rng& rng);
  bool mh_update_p0(Rng& rng);

  /// One pass over every coordinate. The reverse order applies the same
  /// component kernels backwards, i.e. the time reversal of the forward sweep.
  SweepStats sweep(Rng& rng, bool row_moves, SweepOrder order = SweepOrder::kForward);

  double log_likelihood_full() const;
  double log_likelihood_test() const;   // exponents 1 - b
  double log_likelihood_train() const;  // exponents b
  double log_joint() const;

  /// Recomputes cached masses from the state (drops accumulated roundoff).
  void refresh();

 private:
  double exponent(std::size_t s, std::size_t t) const { return exponent_(s, t); }
  double cell_loglik(std::size_t s, std::size_t t) const;
  void set_cell(std::size_t s, std::size_t t, double hit, double miss);
  double weighted_loglik(bool test_share) const;
  // Collapsed-prior log odds of z_sc = 1 given the other m_without ones
  // in column c.
  double prior_log_odds(int m_without) const;

  const PreparedData* data_;
  Hyperparams hp_;
  McmcConfig cfg_;
  ModelState state_;
  double beta_ = 1.0;
  RealMatrix exponent_;
  RealMatrix hit_;
  RealMatrix miss_;
  RealMatrix log_hit_;
  RealMatrix log_miss_;
  std::vector<double> row_total_;  // sum_c theta_tc
  std::vector<int> m_;             // column sums of Z
  std::vector<double> scratch_;
};

/// Starting point for a chain (or an RJ proposal) at C haplotypes. Z is
/// deterministic given the data: row s joins feature c when its mean VAF
/// exceeds the c/(C+1) quantile of the nonzero mean VAFs. theta and p0 are
/// prior draws.
ModelState initialize_state(const CountData& data, int C, const Hyperparams& hp, Rng& rng);

/// Single-update forms operating on a value state. Each builds a fresh
/// StateSampler at beta = 1; use StateSampler directly inside loops.
ModelState gibbs_update_z(ModelState state, const CountData& data, const TrainTestSplit& split,
                          const Hyperparams& hp, std::size_t s, std::size_t c, Rng& rng);
ModelState mh_update_row(ModelState state, const CountData& data, const TrainTestSplit& split,
                         const Hyperparams& hp, std::size_t s, Rng& rng,
                         const McmcConfig& cfg = {});
ModelState mh_update_theta(ModelState state, const CountData& data, const TrainTestSplit& split,
                           const Hyperparams& hp, std::size_t t, std::size_t c, Rng& rng,
                           const McmcConfig& cfg = {});
ModelState mh_update_p0(ModelState state, const CountData& data, const TrainTestSplit& split,
                        const Hyperparams& hp, Rng& rng, const McmcConfig& cfg = {});

struct RjOutcome {
  int from_C = 0;
  int proposed_C = 0;
  bool accepted = false;
  bool failed = false;  // non-finite weight; the move was rejected
  double log_ratio = 0.0;
};

/// Bridge levels beta_0 = 0 < ... < beta_K = 1, geometric in the total
/// exponent b + beta (1 - b).
std::vector<double> anneal_schedule(int steps, double mean_train_share);

/// Trans-dimensional move. Proposes C' = C +/- 1 (held at C when that
/// leaves [1, c_max]), draws a proposal from the training posterior at C'
/// by an inner chain from initialize_state, and accepts on the ratio of
/// prior(C) * test likelihood. With rj_anneal_steps > 1 the test
/// likelihood is replaced by an annealed importance weight along the
/// levels of anneal_schedule, for both the proposal (forward path) and the
/// current state (reverse path). `chain` must be at beta = 1.
RjOutcome rj_move(StateSampler& chain, const PreparedData& data, const Hyperparams& hp,
                  const McmcConfig& cfg, Rng& rng);

struct ScalarRecord {
  int iteration = 0;
  int C = 0;
  double log_joint = 0.0;
  double test_loglik = 0.0;
  double p0 = 0.0;
  double row_accept_rate = -1.0;  // -1 when no row moves ran
  double theta_accept_rate = 0.0;
  bool p0_accepted = false;
  bool rj_attempted = false;
  bool rj_accepted = false;
  int rj_proposed_C = 0;
};

struct TraceMeta {
  std::uint64_t seed = 0;
  std::string hyperparams_hash;
  std::string data_hash;
  int burn_in = 0;
  int thin = 1;
  int rj_failures = 0;
};

struct Trace {
  std::vector<int> state_iterations;
  std::vector<ModelState> states;
  std::vector<ScalarRecord> scalars;
  TraceMeta meta;
};

class InitializationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Runs one chain. Deterministic given cfg.seed.
Trace run_chain(const CountData& data, const Hyperparams& hp, const McmcConfig& cfg,
                std::optional<ModelState> init = std::nullopt);

std::string hash_hyperparams(const Hyperparams& hp, const McmcConfig& cfg);
std::string hash_data(const CountData& data);

}  // namespace tumorfa
