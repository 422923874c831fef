#include "tumorfa/simgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "tumorfa/random.hpp"

namespace tumorfa {

void SimTruth::validate() const {
  if (Z_true.rows() == 0 || Z_true.cols() == 0) throw std::invalid_argument("truth Z is empty");
  if (w_true.w.cols() != Z_true.cols() + 1) throw std::invalid_argument("truth weights need C+1 columns");
  for (std::size_t t = 0; t < w_true.w.rows(); ++t) {
    double total = 0.0;
    for (std::size_t c = 0; c < w_true.w.cols(); ++c) {
      if (w_true(t, c) < 0.0) throw std::invalid_argument("negative truth weight");
      total += w_true(t, c);
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("truth weights off the simplex");
  }
  if (!(p0_true >= 0.0 && p0_true <= 1.0)) throw std::invalid_argument("p0_true outside [0,1]");
  if (per_snv_noise && per_snv_noise->size() != Z_true.rows()) {
    throw std::invalid_argument("per-SNV noise has the wrong length");
  }
  if (N_fixed < 0) throw std::invalid_argument("negative depth");
}

double SimTruth::p_true(std::size_t s, std::size_t t) const {
  double p = per_snv_noise ? (*per_snv_noise)[s] : w_true(t, 0) * p0_true;
  for (std::size_t c = 0; c < Z_true.cols(); ++c) {
    if (Z_true(s, c)) p += w_true(t, c + 1);
  }
  return std::min(p, 1.0);
}

BinaryMatrix make_nested_Z_true(std::size_t S) {
  if (S < 1) throw std::invalid_argument("make_nested_Z_true: S must be at least 1");
  constexpr std::array<double, 4> share = {0.15, 0.20, 0.85, 0.90};
  BinaryMatrix Z(S, 4, 0);
  for (std::size_t c = 0; c < share.size(); ++c) {
    const auto last = static_cast<std::size_t>(std::lround(share[c] * static_cast<double>(S)));
    for (std::size_t s = 0; s < last; ++s) Z(s, c) = 1;
  }
  return Z;
}

BinaryMatrix make_paper_Z_true() { return make_nested_Z_true(100); }

WeightMatrix make_paper_weights(std::size_t T, Rng& rng) {
  if (T < 1) throw std::invalid_argument("make_paper_weights: T must be at least 1");
  std::array<double, 4> a = {8.0, 6.0, 3.0, 1.0};
  WeightMatrix out{RealMatrix(T, 5)};
  for (std::size_t t = 0; t < T; ++t) {
    std::shuffle(a.begin(), a.end(), rng);
    const std::array<double, 5> conc = {0.2, a[0], a[1], a[2], a[3]};
    const auto w = draw_dirichlet<Rng>(conc, rng);
    for (std::size_t c = 0; c < 5; ++c) out.w(t, c) = w[c];
  }
  return out;
}

std::vector<double> draw_snv_noise(std::size_t S, double shape1, double shape2, Rng& rng) {
  std::vector<double> eps(S);
  for (double& e : eps) e = draw_beta(shape1, shape2, rng);
  return eps;
}

SimTruth make_paper_truth(const SimulationOptions& opts, Rng& rng) {
  SimTruth truth;
  truth.Z_true = make_nested_Z_true(opts.S);
  truth.w_true = make_paper_weights(opts.T, rng);
  truth.p0_true = opts.p0;
  truth.N_fixed = opts.depth;
  if (opts.snv_noise) {
    truth.per_snv_noise = draw_snv_noise(truth.Z_true.rows(), opts.noise_shape1, opts.noise_shape2, rng);
  }
  truth.validate();
  return truth;
}

CountData simulate_counts(const SimTruth& truth, Rng& rng) {
  truth.validate();
  const std::size_t S = truth.Z_true.rows(), T = truth.w_true.w.rows();
  CountMatrix n(S, T), N(S, T, truth.N_fixed);
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t t = 0; t < T; ++t) {
      std::binomial_distribution<std::int64_t> dist(truth.N_fixed, truth.p_true(s, t));
      n(s, t) = dist(rng);
    }
  }
  return CountData::from_matrices(std::move(n), std::move(N));
}

double fitted_prob(const FitSummary& summary, std::size_t s, std::size_t t) {
  double p = summary.p0_star * summary.w_star(t, 0);
  for (int c = 0; c < summary.C_star; ++c) {
    if (summary.Z_star(s, c)) p += summary.w_star(t, c + 1);
  }
  return p;
}

ErrorReport error_report(const SimTruth& truth, const FitSummary& summary, int bins) {
  const std::size_t S = truth.Z_true.rows(), T = truth.w_true.w.rows();
  if (summary.Z_star.rows() != S || summary.w_star.w.rows() != T) {
    throw std::invalid_argument("error_report: truth and summary dimensions differ");
  }
  if (bins < 1) throw std::invalid_argument("error_report: need at least one bin");
  std::vector<double> err;
  err.reserve(S * T);
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t t = 0; t < T; ++t) err.push_back(fitted_prob(summary, s, t) - truth.p_true(s, t));

  ErrorReport rep;
  for (double e : err) {
    rep.mean += e;
    rep.mean_abs += std::abs(e);
    rep.max_abs = std::max(rep.max_abs, std::abs(e));
  }
  const double count = static_cast<double>(err.size());
  rep.mean /= count;
  rep.mean_abs /= count;
  for (double e : err) rep.sd += (e - rep.mean) * (e - rep.mean);
  rep.sd = err.size() > 1 ? std::sqrt(rep.sd / (count - 1.0)) : 0.0;

  // Symmetric bins around zero covering the largest error.
  const double half = rep.max_abs > 0.0 ? rep.max_abs : 1e-12;
  rep.bin_counts.assign(bins, 0);
  for (int i = 0; i <= bins; ++i) rep.bin_edges.push_back(-half + 2.0 * half * i / bins);
  for (double e : err) {
    auto k = static_cast<int>((e + half) / (2.0 * half) * bins);
    rep.bin_counts[std::clamp(k, 0, bins - 1)]++;
  }
  return rep;
}

}  // namespace tumorfa
