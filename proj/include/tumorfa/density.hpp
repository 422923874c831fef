#pragma once

#include <cstddef>

#include "tumorfa/types.hpp"

namespace tumorfa {

/// Probability that a read of SNV s in sample t carries the variant:
/// w_t0 * p0 + sum_c w_tc * z_sc, with w the row-normalized theta.
double success_prob(const ModelState& state, std::size_t s, std::size_t t);

/// log Binomial(n; N, p) including the binomial coefficient.
double log_binomial_pmf(std::int64_t n, std::int64_t N, double p);

/// Same, with the success and failure probabilities given separately so
/// callers can avoid cancellation in 1 - p.
double log_binomial_pmf(std::int64_t n, std::int64_t N, double p, double q);

double log_likelihood(const CountData& data, const ModelState& state);

/// Feature-allocation prior on Z with the selection probabilities mu_c
/// integrated out (Beta(alpha/C, 1) x Bernoulli conjugacy).
double log_prior_Z_collapsed(const BinaryMatrix& Z, double alpha, int C);

/// log p(Z | mu) for explicit selection probabilities; used to check the
/// collapsed form.
double log_prior_Z_given_mu(const BinaryMatrix& Z, const std::vector<double>& mu);

double log_prior_theta(const RealMatrix& theta, double a, double a0);
double log_prior_p0(double p0, double a00, double b00);
double log_prior_C(int C, double r);

double log_joint(const CountData& data, const ModelState& state, const Hyperparams& hp);

/// Log-densities of the standard distributions used above.
double log_gamma_pdf(double x, double shape);  // unit rate
double log_beta_pdf(double x, double a, double b);
double log_beta_fn(double a, double b);

}  // namespace tumorfa
