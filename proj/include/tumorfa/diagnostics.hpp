#pragma once

#include <span>
#include <string>
#include <vector>

#include "tumorfa/sampler.hpp"

namespace tumorfa {

/// Standard error of the mean by non-overlapping batch means. Uses
/// floor(sqrt(n)) batches when `batches` is 0.
double batch_means_se(std::span<const double> x, std::size_t batches = 0);

/// Effective sample size from Geyer's initial positive sequence of
/// autocorrelations.
double effective_sample_size(std::span<const double> x);

/// Geweke z-score comparing the means of the first and last fractions of
/// the series; each variance is a batch-means estimate.
double geweke_z(std::span<const double> x, double first = 0.1, double last = 0.5);

struct SeriesDiagnostics {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double ess = 0.0;
  double geweke = 0.0;
};

struct ChainDiagnostics {
  std::size_t iterations = 0;
  double row_accept_rate = 0.0;    // over iterations that ran row moves
  double theta_accept_rate = 0.0;
  double p0_accept_rate = 0.0;
  int rj_attempts = 0;
  int rj_accepts = 0;
  int rj_failures = 0;
  std::vector<SeriesDiagnostics> series;  // C, log_joint, test_loglik, p0
};

ChainDiagnostics diagnose(const Trace& trace);

}  // namespace tumorfa
