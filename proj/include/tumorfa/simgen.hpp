#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tumorfa/sampler.hpp"
#include "tumorfa/summary.hpp"
#include "tumorfa/types.hpp"

namespace tumorfa {

/// Ground truth of a synthetic dataset.
struct SimTruth {
  BinaryMatrix Z_true;   // S x C
  WeightMatrix w_true;   // T x (C+1)
  double p0_true = 0.01;
  /// When set, replaces the background term w_t0 * p0 by eps_s for SNV s.
  std::optional<std::vector<double>> per_snv_noise;
  std::int64_t N_fixed = 50;

  int C() const { return static_cast<int>(Z_true.cols()); }
  void validate() const;
  /// True success probability of cell (s, t).
  double p_true(std::size_t s, std::size_t t) const;
};

/// 100 x 4 nested haplotype structure of the simulation study: haplotype
/// 1 carries SNVs 1-15, 2 carries 1-20, 3 carries 1-85 and 4 carries 1-90.
BinaryMatrix make_paper_Z_true();

/// The same nesting for S SNVs: haplotype c carries the first
/// round(share_c * S) SNVs with shares 0.15, 0.20, 0.85, 0.90.
BinaryMatrix make_nested_Z_true(std::size_t S);

/// Per sample, w_t ~ Dirichlet(0.2, random permutation of (8, 6, 3, 1)).
WeightMatrix make_paper_weights(std::size_t T, Rng& rng);

/// SNV-specific background rates, eps_s ~ Beta(shape1, shape2).
std::vector<double> draw_snv_noise(std::size_t S, double shape1, double shape2, Rng& rng);

struct SimulationOptions {
  std::size_t S = 100;
  std::size_t T = 30;
  std::int64_t depth = 50;
  double p0 = 0.01;
  bool snv_noise = false;
  double noise_shape1 = 3.0;
  double noise_shape2 = 297.0;
};

SimTruth make_paper_truth(const SimulationOptions& opts, Rng& rng);

/// n_st ~ Binomial(N_fixed, p_true(s, t)).
CountData simulate_counts(const SimTruth& truth, Rng& rng);

struct ErrorReport {
  double mean = 0.0;
  double sd = 0.0;
  double mean_abs = 0.0;
  double max_abs = 0.0;
  std::vector<double> bin_edges;          // bins + 1 edges
  std::vector<std::size_t> bin_counts;
};

/// p_hat(s,t) from a fit summary: p0* w*_t0 + sum_c w*_tc z*_sc.
double fitted_prob(const FitSummary& summary, std::size_t s, std::size_t t);

/// Statistics of p_hat(s,t) - p_true(s,t) over all cells.
ErrorReport error_report(const SimTruth& truth, const FitSummary& summary, int bins = 20);

}  // namespace tumorfa
