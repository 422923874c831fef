#include "tumorfa/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "tumorfa/density.hpp"
#include "tumorfa/random.hpp"

namespace tumorfa {

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

bool accept(double log_ratio, Rng& rng) {
  if (log_ratio >= 0.0) return true;
  if (!std::isfinite(log_ratio)) return false;
  return std::log(draw_uniform(rng)) < log_ratio;
}

}  // namespace

TrainTestSplit draw_split(std::size_t S, std::size_t T, double shape1, double shape2, Rng& rng) {
  if (!(shape1 > 0.0) || !(shape2 > 0.0)) {
    throw std::invalid_argument("draw_split: Beta shapes must be positive");
  }
  TrainTestSplit split{RealMatrix(S, T)};
  for (double& v : split.b.raw()) {
    v = draw_beta(shape1, shape2, rng);
    // Keep the open-interval invariant even for degenerate shapes.
    v = std::clamp(v, 1e-12, 1.0 - 1e-12);
  }
  return split;
}

void McmcConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("iterations must be positive");
  if (burn_in < 0 || burn_in >= iterations) throw std::invalid_argument("burn_in must lie in [0, iterations)");
  if (thin < 1) throw std::invalid_argument("thin must be at least 1");
  if (!(theta_step > 0.0) || !(p0_step > 0.0)) throw std::invalid_argument("MH step sizes must be positive");
  if (!(row_flip_prob >= 0.0 && row_flip_prob <= 1.0)) {
    throw std::invalid_argument("row_flip_prob must lie in [0,1]");
  }
  if (!(rj_prob >= 0.0 && rj_prob <= 1.0)) throw std::invalid_argument("rj_prob must lie in [0,1]");
  if (rj_inner_iters < 0) throw std::invalid_argument("rj_inner_iters must be nonnegative");
  if (rj_anneal_steps < 1) throw std::invalid_argument("rj_anneal_steps must be at least 1");
  if (!(split_shape1 > 0.0) || !(split_shape2 > 0.0)) {
    throw std::invalid_argument("split shapes must be positive");
  }
  if (init_C < 0) throw std::invalid_argument("init_C must be nonnegative");
}

PreparedData::PreparedData(const CountData& data, TrainTestSplit split)
    : counts_(&data),
      S_(data.num_snvs()),
      T_(data.num_samples()),
      n_(S_, T_),
      N_(S_, T_),
      log_choose_(S_, T_),
      split_(std::move(split)) {
  data.validate();
  if (split_.b.rows() != S_ || split_.b.cols() != T_) {
    throw std::invalid_argument("split dimensions do not match the data");
  }
  for (std::size_t s = 0; s < S_; ++s) {
    for (std::size_t t = 0; t < T_; ++t) {
      n_(s, t) = static_cast<double>(data.n(s, t));
      N_(s, t) = static_cast<double>(data.N(s, t));
      log_choose_(s, t) = std::lgamma(N_(s, t) + 1.0) - std::lgamma(n_(s, t) + 1.0) -
                          std::lgamma(N_(s, t) - n_(s, t) + 1.0);
    }
  }
}

// ---------------------------------------------------------------------------
// StateSampler

StateSampler::StateSampler(const PreparedData& data, const Hyperparams& hp, const McmcConfig& cfg,
                           ModelState state, double beta)
    : data_(&data), hp_(hp), cfg_(cfg), state_(std::move(state)) {
  state_.validate();
  if (state_.num_snvs() != data.S() || state_.num_samples() != data.T()) {
    throw std::invalid_argument("state dimensions do not match the data");
  }
  set_beta(beta);
  refresh();
}

void StateSampler::set_beta(double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in [0,1]");
  beta_ = beta;
  const std::size_t S = data_->S(), T = data_->T();
  if (exponent_.rows() != S) exponent_ = RealMatrix(S, T);
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t t = 0; t < T; ++t) {
      const double b = data_->b(s, t);
      exponent_(s, t) = beta == 1.0 ? 1.0 : b + beta * (1.0 - b);
    }
  }
}

void StateSampler::refresh() {
  const std::size_t S = data_->S(), T = data_->T();
  const int C = state_.C;
  hit_ = RealMatrix(S, T);
  miss_ = RealMatrix(S, T);
  log_hit_ = RealMatrix(S, T);
  log_miss_ = RealMatrix(S, T);
  row_total_.assign(T, 0.0);
  m_.assign(C, 0);
  for (std::size_t s = 0; s < S; ++s) {
    for (int c = 0; c < C; ++c) m_[c] += state_.Z(s, c);
  }
  for (std::size_t t = 0; t < T; ++t) {
    const double* th = state_.theta.row(t);
    row_total_[t] = std::accumulate(th, th + C + 1, 0.0);
    for (std::size_t s = 0; s < S; ++s) {
      double hit = th[0] * state_.p0;
      double miss = th[0] * (1.0 - state_.p0);
      const std::uint8_t* z = state_.Z.row(s);
      for (int c = 0; c < C; ++c) (z[c] ? hit : miss) += th[c + 1];
      set_cell(s, t, hit, miss);
    }
  }
}

void StateSampler::set_cell(std::size_t s, std::size_t t, double hit, double miss) {
  hit_(s, t) = hit;
  miss_(s, t) = miss;
  log_hit_(s, t) = std::log(hit);
  log_miss_(s, t) = std::log(miss);
}

double StateSampler::cell_loglik(std::size_t s, std::size_t t) const {
  const double n = data_->n(s, t);
  const double N = data_->N(s, t);
  if (N == 0.0) return 0.0;
  double out = -N * std::log(row_total_[t]);
  if (n > 0.0) out += n * log_hit_(s, t);
  if (N > n) out += (N - n) * log_miss_(s, t);
  return out;
}

double StateSampler::prior_log_odds(int m_without) const {
  const double ac = hp_.alpha / state_.C;
  const double S = static_cast<double>(data_->S());
  return std::log(m_without + ac) - std::log(S - m_without);
}

int StateSampler::gibbs_update_z(std::size_t s, std::size_t c, Rng& rng) {
  const std::size_t T = data_->T();
  const int z = state_.Z(s, c);
  double log_odds = prior_log_odds(m_[c] - z);
  // Masses and their logs with z_sc flipped.
  scratch_.resize(4 * T);
  double* hit = scratch_.data();
  double* miss = hit + T;
  double* lhit = miss + T;
  double* lmiss = lhit + T;
  const double sign = z ? -1.0 : 1.0;
  for (std::size_t t = 0; t < T; ++t) {
    const double th = state_.theta(t, c + 1);
    hit[t] = hit_(s, t) + sign * th;
    miss[t] = miss_(s, t) - sign * th;
    if (hit[t] <= 0.0 || miss[t] <= 0.0) {
      // Cancellation ate the background mass; recompute exactly.
      const double* row = state_.theta.row(t);
      double h = row[0] * state_.p0, m = row[0] * (1.0 - state_.p0);
      for (int k = 0; k < state_.C; ++k) {
        const bool on = static_cast<std::size_t>(k) == c ? z == 0 : state_.Z(s, k) != 0;
        (on ? h : m) += row[k + 1];
      }
      hit[t] = h;
      miss[t] = m;
    }
    lhit[t] = std::log(hit[t]);
    lmiss[t] = std::log(miss[t]);
    const double N = data_->N(s, t);
    if (N == 0.0) continue;
    const double n = data_->n(s, t);
    // Log-likelihood change of flipping, signed toward z = 1.
    const double d = n * (lhit[t] - log_hit_(s, t)) + (N - n) * (lmiss[t] - log_miss_(s, t));
    log_odds += sign * exponent(s, t) * d;
  }
  const int z_new = draw_uniform(rng) < logistic(log_odds) ? 1 : 0;
  if (z_new != z) {
    state_.Z(s, c) = static_cast<std::uint8_t>(z_new);
    m_[c] += z_new - z;
    for (std::size_t t = 0; t < T; ++t) {
      hit_(s, t) = hit[t];
      miss_(s, t) = miss[t];
      log_hit_(s, t) = lhit[t];
      log_miss_(s, t) = lmiss[t];
    }
  }
  return z_new;
}

bool StateSampler::mh_update_row(std::size_t s, Rng& rng, std::optional<double> flip_prob) {
  const double rho = flip_prob.value_or(cfg_.row_flip_prob);
  const int C = state_.C;
  const std::size_t T = data_->T();
  std::vector<int> flips;
  for (int c = 0; c < C; ++c) {
    if (draw_uniform(rng) < rho) flips.push_back(c);
  }
  if (flips.empty()) return true;  // identity proposal, ratio 1

  double log_ratio = 0.0;
  for (int c : flips) {
    const int z = state_.Z(s, c);
    const double odds = prior_log_odds(m_[c] - z);
    log_ratio += z ? -odds : odds;
  }
  scratch_.resize(2 * T);
  double* new_hit = scratch_.data();
  double* new_miss = new_hit + T;
  for (std::size_t t = 0; t < T; ++t) {
    double hit = hit_(s, t), miss = miss_(s, t);
    for (int c : flips) {
      const double th = state_.theta(t, c + 1);
      if (state_.Z(s, c)) {
        hit -= th;
        miss += th;
      } else {
        hit += th;
        miss -= th;
      }
    }
    if (hit <= 0.0 || miss <= 0.0) {
      const double* row = state_.theta.row(t);
      hit = row[0] * state_.p0;
      miss = row[0] * (1.0 - state_.p0);
      for (int c = 0; c < C; ++c) {
        const bool flipped = std::find(flips.begin(), flips.end(), c) != flips.end();
        const bool on = static_cast<bool>(state_.Z(s, c)) != flipped;
        (on ? hit : miss) += row[c + 1];
      }
    }
    new_hit[t] = hit;
    new_miss[t] = miss;
    const double N = data_->N(s, t);
    if (N == 0.0) continue;
    const double n = data_->n(s, t);
    double d = 0.0;
    if (n > 0.0) d += n * (std::log(hit) - log_hit_(s, t));
    if (N > n) d += (N - n) * (std::log(miss) - log_miss_(s, t));
    log_ratio += exponent(s, t) * d;
  }
  if (!accept(log_ratio, rng)) return false;
  for (int c : flips) {
    const int z = state_.Z(s, c);
    state_.Z(s, c) = static_cast<std::uint8_t>(1 - z);
    m_[c] += z ? -1 : 1;
  }
  for (std::size_t t = 0; t < T; ++t) set_cell(s, t, new_hit[t], new_miss[t]);
  return true;
}

bool StateSampler::mh_update_theta(std::size_t t, std::size_t c, Rng& rng) {
  const std::size_t S = data_->S();
  const double old_v = state_.theta(t, c);
  const double step = cfg_.theta_step * draw_normal(rng);
  const double new_v = old_v * std::exp(step);
  if (!(new_v > 0.0) || !std::isfinite(new_v)) return false;
  const double delta = new_v - old_v;
  const double shape = c == 0 ? hp_.a0 : hp_.a;
  // Gamma prior ratio plus the log-scale Jacobian new_v / old_v.
  double log_ratio = (shape - 1.0) * step - delta + step;

  const double old_total = row_total_[t];
  const double new_total = old_total + delta;
  const double log_total_ratio = std::log(new_total) - std::log(old_total);
  const double p0 = state_.p0;
  // Only one of hit/miss moves for c >= 1; keep its new log in scratch.
  scratch_.resize(2 * S);
  double* new_log_hit = scratch_.data();
  double* new_log_miss = new_log_hit + S;
  for (std::size_t s = 0; s < S; ++s) {
    const double n = data_->n(s, t);
    const double N = data_->N(s, t);
    if (c == 0) {
      new_log_hit[s] = std::log(hit_(s, t) + delta * p0);
      new_log_miss[s] = std::log(miss_(s, t) + delta * (1.0 - p0));
    } else if (state_.Z(s, c - 1)) {
      new_log_hit[s] = std::log(hit_(s, t) + delta);
      new_log_miss[s] = log_miss_(s, t);
    } else {
      new_log_hit[s] = log_hit_(s, t);
      new_log_miss[s] = std::log(miss_(s, t) + delta);
    }
    if (N == 0.0) continue;
    const double d = -N * log_total_ratio + n * (new_log_hit[s] - log_hit_(s, t)) +
                     (N - n) * (new_log_miss[s] - log_miss_(s, t));
    log_ratio += exponent(s, t) * d;
  }
  if (!accept(log_ratio, rng)) return false;
  state_.theta(t, c) = new_v;
  row_total_[t] = new_total;
  for (std::size_t s = 0; s < S; ++s) {
    if (c == 0) {
      hit_(s, t) += delta * p0;
      miss_(s, t) += delta * (1.0 - p0);
    } else if (state_.Z(s, c - 1)) {
      hit_(s, t) += delta;
    } else {
      miss_(s, t) += delta;
    }
    log_hit_(s, t) = new_log_hit[s];
    log_miss_(s, t) = new_log_miss[s];
  }
  return true;
}

bool StateSampler::mh_update_p0(Rng& rng) {
  const std::size_t S = data_->S(), T = data_->T();
  const double old_p = state_.p0;
  const double logit_old = std::log(old_p) - std::log1p(-old_p);
  const double new_p = logistic(logit_old + cfg_.p0_step * draw_normal(rng));
  if (!(new_p > 0.0 && new_p < 1.0)) return false;
  const double dp = new_p - old_p;
  double log_ratio = log_beta_pdf(new_p, hp_.a00, hp_.b00) - log_beta_pdf(old_p, hp_.a00, hp_.b00) +
                     std::log(new_p) + std::log1p(-new_p) - std::log(old_p) - std::log1p(-old_p);
  for (std::size_t t = 0; t < T; ++t) {
    const double shift = state_.theta(t, 0) * dp;
    for (std::size_t s = 0; s < S; ++s) {
      const double N = data_->N(s, t);
      if (N == 0.0) continue;
      const double n = data_->n(s, t);
      double d = 0.0;
      if (n > 0.0) d += n * (std::log(hit_(s, t) + shift) - log_hit_(s, t));
      if (N > n) d += (N - n) * (std::log(miss_(s, t) - shift) - log_miss_(s, t));
      log_ratio += exponent(s, t) * d;
    }
  }
  if (!accept(log_ratio, rng)) return false;
  state_.p0 = new_p;
  for (std::size_t t = 0; t < T; ++t) {
    const double shift = state_.theta(t, 0) * dp;
    for (std::size_t s = 0; s < S; ++s) set_cell(s, t, hit_(s, t) + shift, miss_(s, t) - shift);
  }
  return true;
}

SweepStats StateSampler::sweep(Rng& rng, bool row_moves, SweepOrder order) {
  refresh();
  SweepStats stats;
  const std::size_t S = data_->S(), T = data_->T();
  const std::size_t C = static_cast<std::size_t>(state_.C);
  auto z_pass = [&] {
    if (order == SweepOrder::kForward) {
      for (std::size_t s = 0; s < S; ++s)
        for (std::size_t c = 0; c < C; ++c) gibbs_update_z(s, c, rng);
    } else {
      for (std::size_t s = S; s-- > 0;)
        for (std::size_t c = C; c-- > 0;) gibbs_update_z(s, c, rng);
    }
  };
  auto row_pass = [&] {
    if (!row_moves) return;
    for (std::size_t i = 0; i < S; ++i) {
      const std::size_t s = order == SweepOrder::kForward ? i : S - 1 - i;
      ++stats.row_proposals;
      stats.row_accepts += mh_update_row(s, rng);
    }
  };
  auto theta_pass = [&] {
    for (std::size_t i = 0; i < T * (C + 1); ++i) {
      const std::size_t k = order == SweepOrder::kForward ? i : T * (C + 1) - 1 - i;
      ++stats.theta_proposals;
      stats.theta_accepts += mh_update_theta(k / (C + 1), k % (C + 1), rng);
    }
  };
  if (order == SweepOrder::kForward) {
    z_pass();
    row_pass();
    theta_pass();
    stats.p0_accepted = mh_update_p0(rng);
  } else {
    stats.p0_accepted = mh_update_p0(rng);
    theta_pass();
    row_pass();
    z_pass();
  }
  return stats;
}

double StateSampler::weighted_loglik(bool test_share) const {
  double total = 0.0;
  for (std::size_t s = 0; s < data_->S(); ++s) {
    for (std::size_t t = 0; t < data_->T(); ++t) {
      if (data_->N(s, t) == 0.0) continue;
      const double b = data_->b(s, t);
      const double weight = test_share ? 1.0 - b : b;
      total += weight * (data_->log_choose(s, t) + cell_loglik(s, t));
    }
  }
  return total;
}

double StateSampler::log_likelihood_full() const {
  double total = 0.0;
  for (std::size_t s = 0; s < data_->S(); ++s) {
    for (std::size_t t = 0; t < data_->T(); ++t) {
      if (data_->N(s, t) == 0.0) continue;
      total += data_->log_choose(s, t) + cell_loglik(s, t);
    }
  }
  return total;
}

double StateSampler::log_likelihood_test() const { return weighted_loglik(true); }
double StateSampler::log_likelihood_train() const { return weighted_loglik(false); }

double StateSampler::log_joint() const {
  return log_likelihood_full() + log_prior_Z_collapsed(state_.Z, hp_.alpha, state_.C) +
         log_prior_theta(state_.theta, hp_.a, hp_.a0) + log_prior_p0(state_.p0, hp_.a00, hp_.b00) +
         log_prior_C(state_.C, hp_.r);
}

// ---------------------------------------------------------------------------

ModelState initialize_state(const CountData& data, int C, const Hyperparams& hp, Rng& rng) {
  if (C < 1) throw std::invalid_argument("initialize_state: C must be at least 1");
  const std::size_t S = data.num_snvs(), T = data.num_samples();
  ModelState state;
  state.C = C;
  state.Z = BinaryMatrix(S, C, 0);

  std::vector<double> vaf(S, 0.0);
  for (std::size_t s = 0; s < S; ++s) {
    double sum = 0.0;
    int used = 0;
    for (std::size_t t = 0; t < T; ++t) {
      if (data.N(s, t) > 0) {
        sum += static_cast<double>(data.n(s, t)) / static_cast<double>(data.N(s, t));
        ++used;
      }
    }
    vaf[s] = used ? sum / used : 0.0;
  }
  std::vector<double> positive;
  for (double v : vaf) {
    if (v > 0.0) positive.push_back(v);
  }
  if (!positive.empty()) {
    std::sort(positive.begin(), positive.end());
    for (int c = 0; c < C; ++c) {
      // Nested bands: feature 1 is the broadest, feature C the narrowest.
      const double level = static_cast<double>(c) / (C + 1);
      const auto idx = static_cast<std::size_t>(level * static_cast<double>(positive.size() - 1));
      const double cut = positive[idx];
      for (std::size_t s = 0; s < S; ++s) {
        if (vaf[s] > 0.0 && vaf[s] >= cut) state.Z(s, c) = 1;
      }
    }
  }

  state.theta = RealMatrix(T, C + 1);
  for (std::size_t t = 0; t < T; ++t) {
    for (int c = 0; c <= C; ++c) {
      state.theta(t, c) = std::max(draw_gamma(c == 0 ? hp.a0 : hp.a, rng), 1e-300);
    }
  }
  state.p0 = std::clamp(draw_beta(hp.a00, hp.b00, rng), 1e-12, 1.0 - 1e-12);
  return state;
}

namespace {

TrainTestSplit unit_split(const CountData& data, const TrainTestSplit& split) {
  if (split.b.rows() == data.num_snvs() && split.b.cols() == data.num_samples()) return split;
  throw std::invalid_argument("split dimensions do not match the data");
}

}  // namespace

ModelState gibbs_update_z(ModelState state, const CountData& data, const TrainTestSplit& split,
                          const Hyperparams& hp, std::size_t s, std::size_t c, Rng& rng) {
  if (s >= state.num_snvs() || c >= static_cast<std::size_t>(state.C)) {
    throw std::invalid_argument("gibbs_update_z: index out of range");
  }
  PreparedData prepared(data, unit_split(data, split));
  StateSampler sampler(prepared, hp, McmcConfig{}, std::move(state));
  sampler.gibbs_update_z(s, c, rng);
  return sampler.state();
}

ModelState mh_update_row(ModelState state, const CountData& data, const TrainTestSplit& split,
                         const Hyperparams& hp, std::size_t s, Rng& rng, const McmcConfig& cfg) {
  if (s >= state.num_snvs()) throw std::invalid_argument("mh_update_row: index out of range");
  PreparedData prepared(data, unit_split(data, split));
  StateSampler sampler(prepared, hp, cfg, std::move(state));
  sampler.mh_update_row(s, rng);
  return sampler.state();
}

ModelState mh_update_theta(ModelState state, const CountData& data, const TrainTestSplit& split,
                           const Hyperparams& hp, std::size_t t, std::size_t c, Rng& rng,
                           const McmcConfig& cfg) {
  if (t >= state.num_samples() || c > static_cast<std::size_t>(state.C)) {
    throw std::invalid_argument("mh_update_theta: index out of range");
  }
  PreparedData prepared(data, unit_split(data, split));
  StateSampler sampler(prepared, hp, cfg, std::move(state));
  sampler.mh_update_theta(t, c, rng);
  return sampler.state();
}

ModelState mh_update_p0(ModelState state, const CountData& data, const TrainTestSplit& split,
                        const Hyperparams& hp, Rng& rng, const McmcConfig& cfg) {
  PreparedData prepared(data, unit_split(data, split));
  StateSampler sampler(prepared, hp, cfg, std::move(state));
  sampler.mh_update_p0(rng);
  return sampler.state();
}

// ---------------------------------------------------------------------------
// Reversible jump

std::vector<double> anneal_schedule(int steps, double mean_train_share) {
  if (steps < 1) throw std::invalid_argument("anneal_schedule: steps must be at least 1");
  const double b = std::clamp(mean_train_share, 1e-6, 1.0 - 1e-6);
  std::vector<double> betas(steps + 1);
  for (int k = 0; k <= steps; ++k) {
    const double lambda = std::pow(b, 1.0 - static_cast<double>(k) / steps);
    betas[k] = (lambda - b) / (1.0 - b);
  }
  betas.front() = 0.0;
  betas.back() = 1.0;
  return betas;
}

RjOutcome rj_move(StateSampler& chain, const PreparedData& data, const Hyperparams& hp,
                  const McmcConfig& cfg, Rng& rng) {
  if (chain.beta() != 1.0) throw std::invalid_argument("rj_move: chain must target the full posterior");
  RjOutcome out;
  const int C = chain.C();
  out.from_C = C;
  int proposed = draw_uniform(rng) < 0.5 ? C - 1 : C + 1;
  if (proposed < 1 || proposed > hp.c_max) proposed = C;
  out.proposed_C = proposed;

  double mean_b = 0.0;
  for (double v : data.split().b.raw()) mean_b += v;
  mean_b /= static_cast<double>(data.split().b.size());
  const int K = cfg.rj_anneal_steps;
  const std::vector<double> betas = anneal_schedule(K, mean_b);

  // Reverse path from the current state down to the training posterior.
  double log_w_current = (betas[K] - betas[K - 1]) * chain.log_likelihood_test();
  if (K > 1) {
    StateSampler down = chain;
    for (int k = K - 1; k >= 1; --k) {
      down.set_beta(betas[k]);
      down.sweep(rng, true, SweepOrder::kReverse);
      log_w_current += (betas[k] - betas[k - 1]) * down.log_likelihood_test();
    }
  }

  // Forward path: training-posterior draw at the proposed C, then up.
  StateSampler up(data, hp, cfg, initialize_state(data.counts(), proposed, hp, rng), 0.0);
  for (int i = 0; i < cfg.rj_inner_iters; ++i) up.sweep(rng, true, SweepOrder::kForward);
  double log_w_proposal = (betas[1] - betas[0]) * up.log_likelihood_test();
  for (int k = 1; k < K; ++k) {
    up.set_beta(betas[k]);
    up.sweep(rng, true, SweepOrder::kForward);
    log_w_proposal += (betas[k + 1] - betas[k]) * up.log_likelihood_test();
  }

  out.log_ratio = log_prior_C(proposed, hp.r) - log_prior_C(C, hp.r) + log_w_proposal - log_w_current;
  if (!std::isfinite(log_w_proposal) || !std::isfinite(log_w_current) || std::isnan(out.log_ratio)) {
    out.failed = true;
    return out;
  }
  if (accept(out.log_ratio, rng)) {
    up.set_beta(1.0);
    up.refresh();
    chain = std::move(up);
    out.accepted = true;
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

}  // namespace

std::string hash_hyperparams(const Hyperparams& hp, const McmcConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << hp.r << ' ' << hp.alpha << ' ' << hp.a << ' ' << hp.a0 << ' ' << hp.a00 << ' ' << hp.b00 << ' '
     << hp.c_max << '|' << cfg.iterations << ' ' << cfg.burn_in << ' ' << cfg.thin << ' ' << cfg.theta_step
     << ' ' << cfg.p0_step << ' ' << cfg.row_flip_prob << ' ' << cfg.enable_rj << ' ' << cfg.rj_prob << ' '
     << cfg.rj_inner_iters << ' ' << cfg.rj_anneal_steps << ' ' << cfg.split_shape1 << ' '
     << cfg.split_shape2 << ' ' << cfg.init_C;
  return fnv1a_hex(os.str());
}

std::string hash_data(const CountData& data) {
  std::ostringstream os;
  os << data.num_snvs() << 'x' << data.num_samples() << ':';
  for (std::size_t i = 0; i < data.n.size(); ++i) os << data.n.raw()[i] << '/' << data.N.raw()[i] << ',';
  for (const auto& id : data.snv_ids) os << id << ',';
  for (const auto& id : data.sample_ids) os << id << ',';
  return fnv1a_hex(os.str());
}

Trace run_chain(const CountData& data, const Hyperparams& hp, const McmcConfig& cfg,
                std::optional<ModelState> init) {
  data.validate();
  hp.validate();
  cfg.validate();
  Rng rng(cfg.seed);
  PreparedData prepared(data, draw_split(data.num_snvs(), data.num_samples(), cfg.split_shape1,
                                         cfg.split_shape2, rng));
  ModelState start;
  if (init) {
    start = std::move(*init);
  } else {
    int c0 = cfg.init_C > 0 ? cfg.init_C : static_cast<int>(std::lround(1.0 / hp.r));
    c0 = std::clamp(c0, 1, hp.c_max);
    start = initialize_state(data, c0, hp, rng);
  }
  if (start.C > hp.c_max) throw InitializationError("initial C exceeds c_max");
  StateSampler chain(prepared, hp, cfg, std::move(start));
  const double lj0 = chain.log_joint();
  if (!std::isfinite(lj0)) {
    throw InitializationError("non-finite joint log density at initialization (" + std::to_string(lj0) + ")");
  }

  Trace trace;
  trace.meta.seed = cfg.seed;
  trace.meta.hyperparams_hash = hash_hyperparams(hp, cfg);
  trace.meta.data_hash = hash_data(data);
  trace.meta.burn_in = cfg.burn_in;
  trace.meta.thin = cfg.thin;
  trace.scalars.reserve(cfg.iterations - cfg.burn_in);

  for (int it = 0; it < cfg.iterations; ++it) {
    const bool row_moves = (it % 2) == 1;
    const SweepStats stats = chain.sweep(rng, row_moves);
    ScalarRecord rec;
    rec.iteration = it;
    if (cfg.enable_rj && draw_uniform(rng) < cfg.rj_prob) {
      const RjOutcome rj = rj_move(chain, prepared, hp, cfg, rng);
      rec.rj_attempted = true;
      rec.rj_accepted = rj.accepted;
      rec.rj_proposed_C = rj.proposed_C;
      if (rj.failed) ++trace.meta.rj_failures;
    }
    if (it < cfg.burn_in) continue;
    rec.C = chain.C();
    rec.log_joint = chain.log_joint();
    rec.test_loglik = chain.log_likelihood_test();
    rec.p0 = chain.state().p0;
    rec.row_accept_rate =
        stats.row_proposals ? static_cast<double>(stats.row_accepts) / stats.row_proposals : -1.0;
    rec.theta_accept_rate =
        stats.theta_proposals ? static_cast<double>(stats.theta_accepts) / stats.theta_proposals : 0.0;
    rec.p0_accepted = stats.p0_accepted;
    trace.scalars.push_back(rec);
    if ((it - cfg.burn_in) % cfg.thin == 0) {
      trace.state_iterations.push_back(it);
      trace.states.push_back(chain.state());
    }
  }
  return trace;
}

}  // namespace tumorfa
