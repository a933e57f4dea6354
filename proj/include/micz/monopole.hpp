#pragma once

#include "micz/liealg.hpp"
#include "micz/report.hpp"

#include <stdexcept>
#include <vector>

namespace micz {

/// Lower bound on q = (r + x_n)/r accepted by chart evaluations.  The
/// trivialization lives on R^{2k+1} minus the closed negative x_n ray,
/// where q -> 0.
inline constexpr double kDefaultChartGuard = 1e-3;

class ChartSingularityError : public std::runtime_error {
 public:
  ChartSingularityError(double q, double q_min);
  double q() const { return q_; }
  double q_min() const { return q_min_; }

 private:
  double q_;
  double q_min_;
};

/// q = (r + x_n)/r; throws std::invalid_argument for r = 0 or non-finite x.
double chart_q(const Eigen::VectorXd& x);

/// Monopole potential at x: g-valued components A_1..A_n with A_n = 0 and
/// A_b = -(1/(r(r+x_n))) x^a gamma_ab.
struct GaugePotential {
  int k = 1;
  Eigen::VectorXd x;
  std::vector<AlgElement> components;  // size n = 2k+1

  const AlgElement& at(int j) const { return components[static_cast<std::size_t>(j)]; }
};

/// Field strength F_jk at x, antisymmetric, g-valued:
///   F_nb = (1/r^3) x^a gamma_ab,
///   F_ab = -(1/r^2)(gamma_ab + x_a A_b - x_b A_a).
struct FieldStrength {
  int k = 1;
  Eigen::VectorXd x;
  std::vector<AlgElement> components;  // n*n, index j*n + l

  const AlgElement& at(int j, int l) const {
    const int n = 2 * k + 1;
    return components[static_cast<std::size_t>(j) * n + l];
  }
};

/// Analytic partial derivatives of A and F with respect to position.
struct MonopoleDerivatives {
  int k = 1;
  Eigen::VectorXd x;
  std::vector<AlgElement> dA;  // n*n, index l*n + b   : d/dx_l A_b
  std::vector<AlgElement> dF;  // n*n*n, (l*n + j)*n+m : d/dx_l F_jm

  const AlgElement& dA_at(int l, int b) const {
    const int n = 2 * k + 1;
    return dA[static_cast<std::size_t>(l) * n + b];
  }
  const AlgElement& dF_at(int l, int j, int m) const {
    const int n = 2 * k + 1;
    return dF[(static_cast<std::size_t>(l) * n + j) * n + m];
  }
};

GaugePotential gauge_potential(const Eigen::VectorXd& x, int k,
                               double q_min = kDefaultChartGuard);
FieldStrength field_strength(const Eigen::VectorXd& x, int k, double q_min = kDefaultChartGuard);
MonopoleDerivatives monopole_derivatives(const Eigen::VectorXd& x, int k,
                                         double q_min = kDefaultChartGuard);

/// Scalar field strength <xi, F_jk>, antisymmetric n x n.
Eigen::MatrixXd field_scalar(const FieldStrength& f, const AlgElement& xi);
Eigen::MatrixXd field_scalar(const Eigen::VectorXd& x, const AlgElement& xi,
                             double q_min = kDefaultChartGuard);

/// i[a, b] for g-valued coefficients over the gamma basis.
AlgElement gauge_commutator(const AlgElement& a, const AlgElement& b);

/// Covariant derivative nabla_l F_jm = d_l F_jm + i[A_l, F_jm], as a flat
/// n*n*n array indexed like MonopoleDerivatives::dF.
std::vector<AlgElement> covariant_derivative_F(const Eigen::VectorXd& x, int k,
                                               double q_min = kDefaultChartGuard);

/// The same tensor from the closed form
///   nabla_l F_jm = (1/r^2)(-x_j F_lm - x_m F_jl - 2 x_l F_jm),
/// which covariant_derivative_F must reproduce.
std::vector<AlgElement> covariant_derivative_F_rhs(const Eigen::VectorXd& x, int k,
                                                   double q_min = kDefaultChartGuard);

/// Finite-difference route: central differences of F (step h_rel * r) plus
/// the commutator term.  Agreement with the analytic routes is O(h^2).
std::vector<AlgElement> covariant_derivative_F_fd(const Eigen::VectorXd& x, int k,
                                                  double q_min = kDefaultChartGuard,
                                                  double h_rel = 1e-5);

/// Randomized verification of the field identities: transversality and the
/// norm identity, the covariant-derivative relations (analytic and
/// finite-difference routes), the bracket identity evaluated through the
/// Poisson engine, and the cone criterion with its negative control.
VerificationReport verify_monopole_identities(int samples, int k, std::uint64_t seed, double tol);

}  // namespace micz
