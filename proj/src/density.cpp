#include "tumorfa/density.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace tumorfa {

namespace {

void check_index(const ModelState& state, std::size_t s, std::size_t t) {
  if (s >= state.num_snvs() || t >= state.num_samples()) {
    throw std::invalid_argument("success_prob: index out of range");
  }
}

double log_choose(std::int64_t N, std::int64_t n) {
  return std::lgamma(static_cast<double>(N) + 1.0) - std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(N - n) + 1.0);
}

}  // namespace

double success_prob(const ModelState& state, std::size_t s, std::size_t t) {
  check_index(state, s, t);
  const double* th = state.theta.row(t);
  double total = 0.0;
  double hit = th[0] * state.p0;
  for (int c = 0; c <= state.C; ++c) total += th[c];
  for (int c = 0; c < state.C; ++c) {
    if (state.Z(s, c)) hit += th[c + 1];
  }
  return hit / total;
}

double log_binomial_pmf(std::int64_t n, std::int64_t N, double p) {
  return log_binomial_pmf(n, N, p, 1.0 - p);
}

double log_binomial_pmf(std::int64_t n, std::int64_t N, double p, double q) {
  if (N == 0) return 0.0;
  double out = log_choose(N, n);
  if (n > 0) out += static_cast<double>(n) * std::log(p);
  if (N - n > 0) out += static_cast<double>(N - n) * std::log(q);
  return out;
}

double log_likelihood(const CountData& data, const ModelState& state) {
  const std::size_t S = data.num_snvs();
  const std::size_t T = data.num_samples();
  if (state.num_snvs() != S || state.num_samples() != T) {
    throw std::invalid_argument("log_likelihood: data and state dimensions differ");
  }
  double total = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const double* th = state.theta.row(t);
    for (std::size_t s = 0; s < S; ++s) {
      if (data.N(s, t) == 0) continue;
      // Accumulate success and failure mass separately; 1 - p loses all
      // precision when the background weight is tiny.
      double hit = th[0] * state.p0;
      double miss = th[0] * (1.0 - state.p0);
      for (int c = 0; c < state.C; ++c) (state.Z(s, c) ? hit : miss) += th[c + 1];
      const double total_mass = hit + miss;
      total += log_binomial_pmf(data.n(s, t), data.N(s, t), hit / total_mass, miss / total_mass);
    }
  }
  return total;
}

double log_beta_fn(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

double log_gamma_pdf(double x, double shape) {
  return (shape - 1.0) * std::log(x) - x - std::lgamma(shape);
}

double log_beta_pdf(double x, double a, double b) {
  return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta_fn(a, b);
}

double log_prior_Z_collapsed(const BinaryMatrix& Z, double alpha, int C) {
  if (!(alpha > 0.0)) throw std::invalid_argument("log_prior_Z_collapsed: alpha must be positive");
  if (C < 1) throw std::invalid_argument("log_prior_Z_collapsed: C must be at least 1");
  if (Z.cols() != static_cast<std::size_t>(C)) {
    throw std::invalid_argument("log_prior_Z_collapsed: Z must have C columns");
  }
  const double S = static_cast<double>(Z.rows());
  const double ac = alpha / C;
  const double norm = log_beta_fn(ac, 1.0);
  double out = 0.0;
  for (int c = 0; c < C; ++c) {
    double m = 0.0;
    for (std::size_t s = 0; s < Z.rows(); ++s) m += Z(s, c);
    out += log_beta_fn(m + ac, S - m + 1.0) - norm;
  }
  return out;
}

double log_prior_Z_given_mu(const BinaryMatrix& Z, const std::vector<double>& mu) {
  if (mu.size() != Z.cols()) throw std::invalid_argument("log_prior_Z_given_mu: mu size mismatch");
  double out = 0.0;
  for (std::size_t c = 0; c < Z.cols(); ++c) {
    double m = 0.0;
    for (std::size_t s = 0; s < Z.rows(); ++s) m += Z(s, c);
    const double rest = static_cast<double>(Z.rows()) - m;
    if (m > 0) out += m * std::log(mu[c]);
    if (rest > 0) out += rest * std::log1p(-mu[c]);
  }
  return out;
}

double log_prior_theta(const RealMatrix& theta, double a, double a0) {
  double out = 0.0;
  for (std::size_t t = 0; t < theta.rows(); ++t) {
    for (std::size_t c = 0; c < theta.cols(); ++c) {
      const double v = theta(t, c);
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument("log_prior_theta: theta entries must be positive");
      }
      out += log_gamma_pdf(v, c == 0 ? a0 : a);
    }
  }
  return out;
}

double log_prior_p0(double p0, double a00, double b00) {
  if (!(p0 > 0.0 && p0 < 1.0)) throw std::invalid_argument("log_prior_p0: p0 must lie in (0,1)");
  return log_beta_pdf(p0, a00, b00);
}

double log_prior_C(int C, double r) {
  if (C < 1) throw std::invalid_argument("log_prior_C: C must be at least 1");
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("log_prior_C: r must lie in (0,1)");
  return std::log(r) + (C - 1) * std::log1p(-r);
}

double log_joint(const CountData& data, const ModelState& state, const Hyperparams& hp) {
  return log_likelihood(data, state) + log_prior_Z_collapsed(state.Z, hp.alpha, state.C) +
         log_prior_theta(state.theta, hp.a, hp.a0) + log_prior_p0(state.p0, hp.a00, hp.b00) +
         log_prior_C(state.C, hp.r);
}

}  // namespace tumorfa
