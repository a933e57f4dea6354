#pragma once

#include "micz/liealg.hpp"

namespace micz {

inline constexpr double kDefaultConeTol = 1e-9;

/// A point of the magnetic cone together with its signed charge.
struct ConePoint {
  AlgElement xi;
  double mu = 0.0;
};

/// sigma_+ = sum_a i*gamma_{2a-1,2a}; generator of the positive cone.
AlgElement sigma_plus(int k);
/// sigma_- flips the sign of the last summand of sigma_+.
AlgElement sigma_minus(int k);

/// Casimir Q(xi) = (1/2k) sum_{a,b} gamma_ab(xi)^2 = |xi|^2 / k.
double casimir_Q(const AlgElement& xi);

/// Max violation of the defining equations sum_a g_ab g_ac = delta_bc Q,
/// relative to max(1, |xi|^2).  Zero exactly on the cone.
double cone_residual(const AlgElement& xi);

bool cone_membership(const AlgElement& xi, double tol = kDefaultConeTol);

/// Pfaffian of an even-dimensional skew-symmetric matrix.
double pfaffian(const Eigen::MatrixXd& skew);

/// Signed magnetic charge: |xi| with the sign of the Pfaffian of the
/// coefficient matrix (positive on the sigma_+ orbit by direct evaluation).
/// Throws std::domain_error when xi is not on the cone.
double charge(const AlgElement& xi, double membership_tol = kDefaultConeTol);

/// Deterministic point of the charge-mu orbit: the rescaled sigma image of
/// a seeded random rotation.  mu = 0 yields the zero element.
ConePoint sample_orbit_point(int k, double mu, std::uint64_t seed);

}  // namespace micz
