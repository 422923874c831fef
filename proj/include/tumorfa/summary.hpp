#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "tumorfa/sampler.hpp"
#include "tumorfa/types.hpp"

namespace tumorfa {

struct FitSummary {
  std::map<int, double> posterior_C;
  int C_star = 0;
  BinaryMatrix Z_star;   // S x C_star
  WeightMatrix w_star;   // T x (C_star + 1)
  double p0_star = 0.0;
  double alignment_cost = 0.0;
  std::size_t samples_at_C_star = 0;
};

/// Empirical distribution of C over the retained iterations.
std::map<int, double> posterior_of_C(const Trace& trace);

/// MAP of a distribution over C; ties go to the smaller C.
int map_C(const std::map<int, double>& posterior);

/// Column-wise mismatch counts D(c, c') = sum_s |z_sc - z'_sc'|.
std::vector<std::int64_t> column_distance_matrix(const BinaryMatrix& Z, const BinaryMatrix& Zp);

/// Minimum over column permutations pi of sum_c D(c, pi_c).
std::int64_t z_distance(const BinaryMatrix& Z, const BinaryMatrix& Zp);

/// Same minimum by enumerating all C! permutations. Reference for tests
/// and small C.
std::int64_t z_distance_exhaustive(const BinaryMatrix& Z, const BinaryMatrix& Zp);

/// perm[c] is the column of Z_sample that lines up with column c of Z_star
/// in a distance-minimizing matching; lexicographically smallest on ties.
std::vector<int> align_columns(const BinaryMatrix& Z_sample, const BinaryMatrix& Z_star);

struct ZEstimate {
  BinaryMatrix Z_star;
  double alignment_cost = 0.0;
  std::size_t samples = 0;
};

/// Among the sampled Z with C = C_star, the one minimizing the average
/// distance to all retained samples at C_star.
ZEstimate point_estimate_Z(const Trace& trace, int C_star);

struct WeightEstimate {
  WeightMatrix w_star;
  double p0_star = 0.0;
};

/// Averages weights over the states at C_star after aligning each sample's
/// columns to Z_star.
WeightEstimate point_estimate_weights(const Trace& trace, int C_star, const BinaryMatrix& Z_star);

FitSummary summarize(const Trace& trace);

/// Pools the retained samples of several chains.
Trace merge_traces(std::span<const Trace> traces);

class SummaryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tumorfa
