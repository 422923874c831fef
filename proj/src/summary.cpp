#include "tumorfa/summary.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "tumorfa/assignment.hpp"

namespace tumorfa {

namespace {

void check_same_shape(const BinaryMatrix& a, const BinaryMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("binary matrices differ in shape");
  }
}

// Columns of Z packed as bit sets, for fast pairwise mismatch counts.
struct PackedColumns {
  std::size_t words = 0;
  int cols = 0;
  std::vector<std::uint64_t> bits;  // cols x words

  explicit PackedColumns(const BinaryMatrix& Z)
      : words((Z.rows() + 63) / 64), cols(static_cast<int>(Z.cols())), bits(words * Z.cols(), 0) {
    for (std::size_t c = 0; c < Z.cols(); ++c) {
      for (std::size_t s = 0; s < Z.rows(); ++s) {
        if (Z(s, c)) bits[c * words + s / 64] |= std::uint64_t{1} << (s % 64);
      }
    }
  }
};

CostMatrix packed_cost(const PackedColumns& a, const PackedColumns& b) {
  CostMatrix m{a.cols, std::vector<std::int64_t>(static_cast<std::size_t>(a.cols) * a.cols)};
  for (int c = 0; c < a.cols; ++c) {
    for (int d = 0; d < b.cols; ++d) {
      std::int64_t count = 0;
      for (std::size_t w = 0; w < a.words; ++w) {
        count += std::popcount(a.bits[c * a.words + w] ^ b.bits[d * b.words + w]);
      }
      m.cost[static_cast<std::size_t>(c) * a.cols + d] = count;
    }
  }
  return m;
}

std::vector<std::size_t> states_at(const Trace& trace, int C) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < trace.states.size(); ++i) {
    if (trace.states[i].C == C) idx.push_back(i);
  }
  return idx;
}

}  // namespace

std::map<int, double> posterior_of_C(const Trace& trace) {
  if (trace.scalars.empty()) throw std::invalid_argument("posterior_of_C: empty trace");
  std::map<int, double> out;
  for (const auto& rec : trace.scalars) out[rec.C] += 1.0;
  const double total = static_cast<double>(trace.scalars.size());
  for (auto& [c, p] : out) p /= total;
  return out;
}

int map_C(const std::map<int, double>& posterior) {
  if (posterior.empty()) throw std::invalid_argument("map_C: empty distribution");
  int best = posterior.begin()->first;
  double best_p = posterior.begin()->second;
  for (const auto& [c, p] : posterior) {
    if (p > best_p) {
      best = c;
      best_p = p;
    }
  }
  return best;
}

std::vector<std::int64_t> column_distance_matrix(const BinaryMatrix& Z, const BinaryMatrix& Zp) {
  check_same_shape(Z, Zp);
  return packed_cost(PackedColumns(Z), PackedColumns(Zp)).cost;
}

std::int64_t z_distance(const BinaryMatrix& Z, const BinaryMatrix& Zp) {
  check_same_shape(Z, Zp);
  return solve_assignment(packed_cost(PackedColumns(Z), PackedColumns(Zp))).total;
}

std::int64_t z_distance_exhaustive(const BinaryMatrix& Z, const BinaryMatrix& Zp) {
  check_same_shape(Z, Zp);
  const int C = static_cast<int>(Z.cols());
  // Direct entrywise count, independent of the packed representation.
  std::vector<std::int64_t> D(static_cast<std::size_t>(C) * C, 0);
  for (int c = 0; c < C; ++c)
    for (int d = 0; d < C; ++d)
      for (std::size_t s = 0; s < Z.rows(); ++s) D[c * C + d] += Z(s, c) != Zp(s, d);
  std::vector<int> perm(C);
  std::iota(perm.begin(), perm.end(), 0);
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  do {
    std::int64_t total = 0;
    for (int c = 0; c < C; ++c) total += D[c * C + perm[c]];
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return C == 0 ? 0 : best;
}

std::vector<int> align_columns(const BinaryMatrix& Z_sample, const BinaryMatrix& Z_star) {
  check_same_shape(Z_sample, Z_star);
  return solve_assignment_lexmin(packed_cost(PackedColumns(Z_star), PackedColumns(Z_sample))).col_of_row;
}

ZEstimate point_estimate_Z(const Trace& trace, int C_star) {
  const auto idx = states_at(trace, C_star);
  if (idx.empty()) {
    throw SummaryError("no retained samples at C = " + std::to_string(C_star) +
                       "; run a longer chain or reduce thinning");
  }
  // Group identical matrices; pairwise work is then over distinct ones.
  std::vector<std::size_t> unique;  // index into trace.states
  std::vector<double> counts;
  std::map<std::vector<std::uint8_t>, std::size_t> seen;
  for (std::size_t i : idx) {
    const auto& raw = trace.states[i].Z.raw();
    auto [it, inserted] = seen.emplace(raw, unique.size());
    if (inserted) {
      unique.push_back(i);
      counts.push_back(1.0);
    } else {
      counts[it->second] += 1.0;
    }
  }
  std::vector<PackedColumns> packed;
  packed.reserve(unique.size());
  for (std::size_t i : unique) packed.emplace_back(trace.states[i].Z);

  const std::size_t U = unique.size();
  std::vector<double> cost(U, 0.0);
  for (std::size_t a = 0; a < U; ++a) {
    for (std::size_t b = a + 1; b < U; ++b) {
      const auto d = static_cast<double>(solve_assignment(packed_cost(packed[a], packed[b])).total);
      cost[a] += counts[b] * d;
      cost[b] += counts[a] * d;
    }
  }
  const double L = static_cast<double>(idx.size());
  std::size_t best = 0;
  for (std::size_t a = 1; a < U; ++a) {
    if (cost[a] < cost[best]) best = a;
  }
  return ZEstimate{trace.states[unique[best]].Z, cost[best] / L, idx.size()};
}

WeightEstimate point_estimate_weights(const Trace& trace, int C_star, const BinaryMatrix& Z_star) {
  const auto idx = states_at(trace, C_star);
  if (idx.empty()) {
    throw SummaryError("no retained samples at C = " + std::to_string(C_star) +
                       "; run a longer chain or reduce thinning");
  }
  const std::size_t T = trace.states[idx.front()].num_samples();
  RealMatrix sum(T, C_star + 1, 0.0);
  double p0_sum = 0.0;
  for (std::size_t i : idx) {
    const ModelState& st = trace.states[i];
    const auto perm = align_columns(st.Z, Z_star);
    const WeightMatrix w = WeightMatrix::from_theta(st.theta);
    for (std::size_t t = 0; t < T; ++t) {
      sum(t, 0) += w(t, 0);
      for (int c = 0; c < C_star; ++c) sum(t, c + 1) += w(t, perm[c] + 1);
    }
    p0_sum += st.p0;
  }
  WeightEstimate out;
  out.w_star = WeightMatrix::from_theta(sum);  // averaging then renormalizing
  out.p0_star = p0_sum / static_cast<double>(idx.size());
  return out;
}

FitSummary summarize(const Trace& trace) {
  FitSummary out;
  out.posterior_C = posterior_of_C(trace);
  out.C_star = map_C(out.posterior_C);
  ZEstimate z = point_estimate_Z(trace, out.C_star);
  out.Z_star = std::move(z.Z_star);
  out.alignment_cost = z.alignment_cost;
  out.samples_at_C_star = z.samples;
  WeightEstimate w = point_estimate_weights(trace, out.C_star, out.Z_star);
  out.w_star = std::move(w.w_star);
  out.p0_star = w.p0_star;
  return out;
}

Trace merge_traces(std::span<const Trace> traces) {
  if (traces.empty()) throw std::invalid_argument("merge_traces: no traces");
  Trace out;
  out.meta = traces.front().meta;
  for (const Trace& tr : traces) {
    out.scalars.insert(out.scalars.end(), tr.scalars.begin(), tr.scalars.end());
    out.states.insert(out.states.end(), tr.states.begin(), tr.states.end());
    out.state_iterations.insert(out.state_iterations.end(), tr.state_iterations.begin(),
                                tr.state_iterations.end());
    if (&tr != &traces.front()) out.meta.rj_failures += tr.meta.rj_failures;
  }
  return out;
}

}  // namespace tumorfa
