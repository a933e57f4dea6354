#pragma once

#include "micz/poisson.hpp"

#include <random>

namespace micz::testing {

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline Eigen::VectorXd random_vector(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, scale);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = gauss(rng);
  return v;
}

inline AlgElement random_element(int k, std::mt19937_64& rng, double scale = 1.0) {
  return AlgElement(k, random_vector(algebra_dim(k), rng, scale));
}

// Chart position with q = (r + x_n)/r kept away from the singular ray.
inline Eigen::VectorXd random_chart_position(int k, std::mt19937_64& rng, double q_floor = 0.1) {
  const int n = 2 * k + 1;
  std::uniform_real_distribution<double> unif(0.7, 1.5);
  Eigen::VectorXd dir;
  do {
    dir = random_vector(n, rng).normalized();
  } while (1.0 + dir[n - 1] < q_floor);
  return unif(rng) * dir;
}

inline AlgElement random_cone_xi(int k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double mu = (0.5 + unif(rng)) * (unif(rng) < 0.5 ? -1.0 : 1.0);
  return sample_orbit_point(k, mu, rng()).xi;
}

inline PhasePoint random_phase_point(int k, std::mt19937_64& rng, bool on_cone = true) {
  Eigen::VectorXd x = random_chart_position(k, rng);
  Eigen::VectorXd pi = random_vector(2 * k + 1, rng);
  AlgElement xi = on_cone ? random_cone_xi(k, rng)
                          : (k >= 2 ? sample_off_cone(k, rng()) : random_element(k, rng));
  return PhasePoint(k, std::move(x), std::move(pi), std::move(xi));
}

}  // namespace micz::testing
