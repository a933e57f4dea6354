#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <utility>
#include <vector>

namespace micz {

/// Dimension of so(2k): number of pairs (a,b) with 1 <= a < b <= 2k.
inline int algebra_dim(int k) { return k * (2 * k - 1); }

/// 1-based position of the pair (a,b), a < b <= 2k, in lexicographic order.
/// Throws std::invalid_argument if the pair is out of range or a >= b.
int basis_index(int a, int b, int k);

/// Inverse of basis_index: the pair stored at 1-based position `index`.
std::pair<int, int> basis_pair(int index, int k);

/// Element of so(2k) or of its dual, stored as the coefficient vector over
/// the orthonormal basis {i*gamma_ab : a < b}.  For a dual element xi the
/// entry at (a,b) is the value of the linear function gamma_ab at xi.
class AlgElement {
 public:
  explicit AlgElement(int k);
  AlgElement(int k, Eigen::VectorXd coeffs);

  static AlgElement zero(int k) { return AlgElement(k); }
  /// The basis function gamma_ab (a != b allowed; gamma_ba = -gamma_ab).
  static AlgElement basis(int a, int b, int k);

  int k() const { return k_; }
  int dim() const { return static_cast<int>(coeffs_.size()); }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  Eigen::VectorXd& coeffs() { return coeffs_; }

  /// Value of gamma_ab; sign handled for a > b, zero for a == b.
  double coeff(int a, int b) const;
  /// Accumulate v * gamma_ab (no-op for a == b).
  void add_coeff(int a, int b, double v);

  /// Antisymmetric 2k x 2k matrix M with M(a-1,b-1) = gamma_ab value.
  Eigen::MatrixXd to_matrix() const;
  static AlgElement from_matrix(const Eigen::MatrixXd& m, int k);

  double dot(const AlgElement& other) const;
  double norm() const { return coeffs_.norm(); }
  double squared_norm() const { return coeffs_.squaredNorm(); }
  double max_abs() const;
  bool is_finite() const;

  AlgElement& operator+=(const AlgElement& rhs);
  AlgElement& operator-=(const AlgElement& rhs);
  AlgElement& operator*=(double s);

  friend AlgElement operator+(AlgElement lhs, const AlgElement& rhs) {
    lhs += rhs;
    return lhs;
  }
  friend AlgElement operator-(AlgElement lhs, const AlgElement& rhs) {
    lhs -= rhs;
    return lhs;
  }
  friend AlgElement operator*(double s, AlgElement x) {
    x *= s;
    return x;
  }
  friend AlgElement operator*(AlgElement x, double s) {
    x *= s;
    return x;
  }

 private:
  int k_;
  Eigen::VectorXd coeffs_;
};

/// Structure constants C^gamma_{alpha beta} of so(2k) over the gamma_ab
/// basis, with the sign fixed so that {T_alpha, T_beta} = -C^gamma_{alpha
/// beta} T_gamma reproduces the bracket of the basis functions.
class StructureConstants {
 public:
  explicit StructureConstants(int k);

  int k() const { return k_; }
  int dim() const { return d_; }

  /// C^gamma_{alpha beta}, all slots 0-based.
  double c(int alpha, int beta, int gamma) const {
    return c_[(static_cast<std::size_t>(alpha) * d_ + beta) * d_ + gamma];
  }

  struct Entry {
    int alpha, beta, gamma;
    double value;
  };
  /// Nonzero entries, for sparse contractions.
  const std::vector<Entry>& nonzeros() const { return nonzeros_; }

  /// Max absolute Jacobi residual over all index quadruples.
  double jacobi_residual() const;

 private:
  int k_;
  int d_;
  std::vector<double> c_;
  std::vector<Entry> nonzeros_;
};

/// Rotation in SO(2k); the constructor rejects matrices that are not
/// orthogonal with determinant +1 (tolerance 1e-12 on ||M^T M - I||).
class GroupElement {
 public:
  GroupElement(int k, Eigen::MatrixXd m);

  int k() const { return k_; }
  const Eigen::MatrixXd& matrix() const { return m_; }

  static GroupElement identity(int k);

 private:
  int k_;
  Eigen::MatrixXd m_;
};

/// Poisson bracket of the linear functions gamma_ab on the dual:
/// {gamma_ab, gamma_cd} = -d_ac g_bd + d_bc g_ad - d_bd g_ac + d_ad g_bc.
AlgElement alg_bracket(const AlgElement& x, const AlgElement& y);

StructureConstants structure_constants(int k);

/// Invariant metric; the gamma basis is orthonormal, so this is the
/// Euclidean dot product of coefficient vectors.
double invariant_metric(const AlgElement& x, const AlgElement& y);

/// Coadjoint action on coefficient matrices: M -> g M g^T.
AlgElement coadjoint_act(const GroupElement& g, const AlgElement& xi);

/// Deterministic approximately-Haar rotation: QR of a seeded Gaussian
/// matrix with sign and determinant correction.
GroupElement random_rotation(int k, std::uint64_t seed);

}  // namespace micz
