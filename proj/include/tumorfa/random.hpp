#pragma once

#include <random>
#include <span>
#include <vector>

namespace tumorfa {

template <typename Urng>
double draw_gamma(double shape, Urng& rng) {
  std::gamma_distribution<double> dist(shape, 1.0);
  return dist(rng);
}

template <typename Urng>
double draw_beta(double a, double b, Urng& rng) {
  const double x = draw_gamma(a, rng);
  const double y = draw_gamma(b, rng);
  return x / (x + y);
}

template <typename Urng>
std::vector<double> draw_dirichlet(std::span<const double> concentration, Urng& rng) {
  std::vector<double> out(concentration.size());
  double total = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = draw_gamma(concentration[i], rng);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

template <typename Urng>
double draw_uniform(Urng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

template <typename Urng>
double draw_normal(Urng& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace tumorfa
