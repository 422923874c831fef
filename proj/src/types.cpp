#include "tumorfa/types.hpp"

#include <cmath>
#include <string>

namespace tumorfa {

void CountData::validate() const {
  if (n.rows() == 0 || n.cols() == 0) {
    throw std::invalid_argument("count data must have at least one SNV and one sample");
  }
  if (N.rows() != n.rows() || N.cols() != n.cols()) {
    throw std::invalid_argument("variant and total read matrices differ in shape");
  }
  if (!snv_ids.empty() && snv_ids.size() != n.rows()) {
    throw std::invalid_argument("snv id count does not match rows");
  }
  if (!sample_ids.empty() && sample_ids.size() != n.cols()) {
    throw std::invalid_argument("sample id count does not match columns");
  }
  for (std::size_t s = 0; s < n.rows(); ++s) {
    for (std::size_t t = 0; t < n.cols(); ++t) {
      if (n(s, t) < 0 || n(s, t) > N(s, t)) {
        throw std::invalid_argument("invalid counts at snv " + std::to_string(s + 1) + ", sample " +
                                    std::to_string(t + 1) + ": n=" + std::to_string(n(s, t)) +
                                    " N=" + std::to_string(N(s, t)));
      }
    }
  }
}

CountData CountData::from_matrices(CountMatrix n, CountMatrix N) {
  CountData d;
  d.n = std::move(n);
  d.N = std::move(N);
  for (std::size_t s = 0; s < d.n.rows(); ++s) d.snv_ids.push_back("snv" + std::to_string(s + 1));
  for (std::size_t t = 0; t < d.n.cols(); ++t) d.sample_ids.push_back("sample" + std::to_string(t + 1));
  d.validate();
  return d;
}

void Hyperparams::validate() const {
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("r must lie in (0,1)");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(a > 0.0) || !(a0 > 0.0)) throw std::invalid_argument("Dirichlet weights must be positive");
  if (!(a00 > 0.0) || !(b00 > 0.0)) throw std::invalid_argument("Beta shapes for p0 must be positive");
  if (c_max < 1) throw std::invalid_argument("c_max must be at least 1");
}

Hyperparams Hyperparams::simulation_preset() {
  Hyperparams hp;
  hp.r = 0.2;
  hp.alpha = 3.0;
  hp.a0 = 0.5;
  hp.a = 0.5;
  hp.a00 = 1.0;
  hp.b00 = 100.0;
  return hp;
}

Hyperparams Hyperparams::pdac_preset() {
  Hyperparams hp;
  hp.r = 0.2;
  hp.alpha = 1.0;
  hp.a = 1.0;
  hp.a0 = 1.0;
  hp.a00 = 5.0;
  hp.b00 = 95.0;
  return hp;
}

void ModelState::validate() const {
  if (C < 1) throw std::invalid_argument("C must be at least 1");
  if (Z.cols() != static_cast<std::size_t>(C)) throw std::invalid_argument("Z must have C columns");
  if (theta.cols() != static_cast<std::size_t>(C) + 1) {
    throw std::invalid_argument("theta must have C+1 columns");
  }
  for (auto z : Z.raw()) {
    if (z > 1) throw std::invalid_argument("Z entries must be 0 or 1");
  }
  for (double v : theta.raw()) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("theta must be strictly positive");
  }
  if (!(p0 > 0.0 && p0 < 1.0)) throw std::invalid_argument("p0 must lie in (0,1)");
}

WeightMatrix WeightMatrix::from_theta(const RealMatrix& theta) {
  WeightMatrix out{RealMatrix(theta.rows(), theta.cols())};
  for (std::size_t t = 0; t < theta.rows(); ++t) {
    double total = 0.0;
    for (std::size_t c = 0; c < theta.cols(); ++c) total += theta(t, c);
    for (std::size_t c = 0; c < theta.cols(); ++c) out.w(t, c) = theta(t, c) / total;
  }
  return out;
}

}  // namespace tumorfa
