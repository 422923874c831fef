#include "tumorfa/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace tumorfa {

namespace {

double mean_of(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance_of(std::span<const double> x, double m) {
  double v = 0.0;
  for (double e : x) v += (e - m) * (e - m);
  return x.size() > 1 ? v / static_cast<double>(x.size() - 1) : 0.0;
}

}  // namespace

double batch_means_se(std::span<const double> x, std::size_t batches) {
  const std::size_t n = x.size();
  if (n < 4) throw std::invalid_argument("batch_means_se: need at least 4 values");
  if (batches == 0) batches = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  batches = std::max<std::size_t>(2, std::min(batches, n / 2));
  const std::size_t len = n / batches;
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) means[b] = mean_of(x.subspan(b * len, len));
  const double m = mean_of(means);
  return std::sqrt(variance_of(means, m) / static_cast<double>(batches));
}

double effective_sample_size(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 4) throw std::invalid_argument("effective_sample_size: need at least 4 values");
  const double m = mean_of(x);
  auto autocov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += (x[i] - m) * (x[i + lag] - m);
    return s / static_cast<double>(n);
  };
  const double g0 = autocov(0);
  if (g0 <= 0.0) return static_cast<double>(n);
  // Sum of consecutive autocorrelation pairs while they stay positive.
  double tau = -1.0;
  for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
    const double pair = (autocov(2 * k) + autocov(2 * k + 1)) / g0;
    if (pair <= 0.0) break;
    tau += 2.0 * pair;
  }
  tau = std::max(tau, 1.0 / static_cast<double>(n));
  return std::min(static_cast<double>(n), static_cast<double>(n) / tau);
}

double geweke_z(std::span<const double> x, double first, double last) {
  if (!(first > 0.0 && last > 0.0 && first + last <= 1.0)) {
    throw std::invalid_argument("geweke_z: fractions must be positive and sum to at most 1");
  }
  const auto na = static_cast<std::size_t>(first * static_cast<double>(x.size()));
  const auto nb = static_cast<std::size_t>(last * static_cast<double>(x.size()));
  if (na < 4 || nb < 4) throw std::invalid_argument("geweke_z: series too short");
  const auto a = x.first(na), b = x.last(nb);
  const double se_a = batch_means_se(a), se_b = batch_means_se(b);
  const double denom = std::sqrt(se_a * se_a + se_b * se_b);
  const double diff = mean_of(a) - mean_of(b);
  if (denom == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / denom;
}

ChainDiagnostics diagnose(const Trace& trace) {
  if (trace.scalars.empty()) throw std::invalid_argument("diagnose: empty trace");
  ChainDiagnostics out;
  out.iterations = trace.scalars.size();
  out.rj_failures = trace.meta.rj_failures;
  std::size_t row_iters = 0, p0_acc = 0;
  std::vector<double> C, lj, tl, p0;
  for (const auto& r : trace.scalars) {
    if (r.row_accept_rate >= 0.0) {
      out.row_accept_rate += r.row_accept_rate;
      ++row_iters;
    }
    out.theta_accept_rate += r.theta_accept_rate;
    p0_acc += r.p0_accepted;
    out.rj_attempts += r.rj_attempted;
    out.rj_accepts += r.rj_accepted;
    C.push_back(r.C);
    lj.push_back(r.log_joint);
    tl.push_back(r.test_loglik);
    p0.push_back(r.p0);
  }
  const auto n = static_cast<double>(out.iterations);
  out.row_accept_rate = row_iters ? out.row_accept_rate / static_cast<double>(row_iters) : 0.0;
  out.theta_accept_rate /= n;
  out.p0_accept_rate = static_cast<double>(p0_acc) / n;

  auto describe = [&](const std::string& name, const std::vector<double>& v) {
    SeriesDiagnostics d{name, mean_of(v), 0.0, static_cast<double>(v.size()), 0.0};
    d.sd = std::sqrt(variance_of(v, d.mean));
    if (v.size() >= 40) {
      d.ess = effective_sample_size(v);
      d.geweke = geweke_z(v);
    }
    out.series.push_back(d);
  };
  describe("C", C);
  describe("log_joint", lj);
  describe("test_loglik", tl);
  describe("p0", p0);
  return out;
}

}  // namespace tumorfa
