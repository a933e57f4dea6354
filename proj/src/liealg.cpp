#include "micz/liealg.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace micz {

namespace {

void require_rank(int k) {
  if (k < 1) throw std::invalid_argument("rank parameter k must be >= 1, got " + std::to_string(k));
}

void require_same_k(const AlgElement& x, const AlgElement& y) {
  if (x.k() != y.k())
    throw std::invalid_argument("rank mismatch: k=" + std::to_string(x.k()) + " vs k=" +
                                std::to_string(y.k()));
}

}  // namespace

int basis_index(int a, int b, int k) {
  require_rank(k);
  const int m = 2 * k;
  if (a < 1 || b > m || a >= b)
    throw std::invalid_argument("basis_index requires 1 <= a < b <= 2k, got (" + std::to_string(a) +
                                "," + std::to_string(b) + ") with k=" + std::to_string(k));
  return (a - 1) * m - a * (a - 1) / 2 + (b - a);
}

std::pair<int, int> basis_pair(int index, int k) {
  require_rank(k);
  if (index < 1 || index > algebra_dim(k))
    throw std::invalid_argument("basis index out of range: " + std::to_string(index));
  int rest = index;
  const int m = 2 * k;
  for (int a = 1; a < m; ++a) {
    const int row = m - a;
    if (rest <= row) return {a, a + rest};
    rest -= row;
  }
  throw std::logic_error("basis_pair: unreachable");
}

AlgElement::AlgElement(int k) : k_(k), coeffs_(Eigen::VectorXd::Zero(algebra_dim(k))) {
  require_rank(k);
}

AlgElement::AlgElement(int k, Eigen::VectorXd coeffs) : k_(k), coeffs_(std::move(coeffs)) {
  require_rank(k);
  if (coeffs_.size() != algebra_dim(k))
    throw std::invalid_argument("coefficient vector must have length k(2k-1) = " +
                                std::to_string(algebra_dim(k)) + ", got " +
                                std::to_string(coeffs_.size()));
}

AlgElement AlgElement::basis(int a, int b, int k) {
  AlgElement e(k);
  e.add_coeff(a, b, 1.0);
  return e;
}

double AlgElement::coeff(int a, int b) const {
  if (a == b) return 0.0;
  if (a < b) return coeffs_[basis_index(a, b, k_) - 1];
  return -coeffs_[basis_index(b, a, k_) - 1];
}

void AlgElement::add_coeff(int a, int b, double v) {
  if (a == b) return;
  if (a < b)
    coeffs_[basis_index(a, b, k_) - 1] += v;
  else
    coeffs_[basis_index(b, a, k_) - 1] -= v;
}

Eigen::MatrixXd AlgElement::to_matrix() const {
  const int m = 2 * k_;
  Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(m, m);
  for (int a = 1; a < m; ++a)
    for (int b = a + 1; b <= m; ++b) {
      const double v = coeffs_[basis_index(a, b, k_) - 1];
      mat(a - 1, b - 1) = v;
      mat(b - 1, a - 1) = -v;
    }
  return mat;
}

AlgElement AlgElement::from_matrix(const Eigen::MatrixXd& m, int k) {
  require_rank(k);
  if (m.rows() != 2 * k || m.cols() != 2 * k)
    throw std::invalid_argument("matrix must be 2k x 2k");
  AlgElement e(k);
  for (int a = 1; a < 2 * k; ++a)
    for (int b = a + 1; b <= 2 * k; ++b)
      e.coeffs_[basis_index(a, b, k) - 1] = 0.5 * (m(a - 1, b - 1) - m(b - 1, a - 1));
  return e;
}

double AlgElement::dot(const AlgElement& other) const {
  require_same_k(*this, other);
  return coeffs_.dot(other.coeffs_);
}

double AlgElement::max_abs() const {
  return coeffs_.size() == 0 ? 0.0 : coeffs_.cwiseAbs().maxCoeff();
}

bool AlgElement::is_finite() const { return coeffs_.allFinite(); }

AlgElement& AlgElement::operator+=(const AlgElement& rhs) {
  require_same_k(*this, rhs);
  coeffs_ += rhs.coeffs_;
  return *this;
}

AlgElement& AlgElement::operator-=(const AlgElement& rhs) {
  require_same_k(*this, rhs);
  coeffs_ -= rhs.coeffs_;
  return *this;
}

AlgElement& AlgElement::operator*=(double s) {
  coeffs_ *= s;
  return *this;
}

AlgElement alg_bracket(const AlgElement& x, const AlgElement& y) {
  require_same_k(x, y);
  const int k = x.k();
  const int d = algebra_dim(k);
  AlgElement out(k);
  for (int alpha = 0; alpha < d; ++alpha) {
    const double xv = x.coeffs()[alpha];
    if (xv == 0.0) continue;
    const auto [a, b] = basis_pair(alpha + 1, k);
    for (int beta = 0; beta < d; ++beta) {
      const double yv = y.coeffs()[beta];
      if (yv == 0.0) continue;
      const auto [c, dd] = basis_pair(beta + 1, k);
      const double w = xv * yv;
      if (a == c) out.add_coeff(b, dd, -w);
      if (b == c) out.add_coeff(a, dd, w);
      if (b == dd) out.add_coeff(a, c, -w);
      if (a == dd) out.add_coeff(b, c, w);
    }
  }
  return out;
}

StructureConstants::StructureConstants(int k) : k_(k), d_(algebra_dim(k)) {
  require_rank(k);
  c_.assign(static_cast<std::size_t>(d_) * d_ * d_, 0.0);
  for (int alpha = 0; alpha < d_; ++alpha) {
    const auto [a, b] = basis_pair(alpha + 1, k);
    for (int beta = 0; beta < d_; ++beta) {
      const auto [c, d] = basis_pair(beta + 1, k);
      const AlgElement br = alg_bracket(AlgElement::basis(a, b, k), AlgElement::basis(c, d, k));
      for (int gamma = 0; gamma < d_; ++gamma) {
        const double v = -br.coeffs()[gamma];
        if (v != 0.0) {
          c_[(static_cast<std::size_t>(alpha) * d_ + beta) * d_ + gamma] = v;
          nonzeros_.push_back({alpha, beta, gamma, v});
        }
      }
    }
  }
}

double StructureConstants::jacobi_residual() const {
  double worst = 0.0;
  for (int alpha = 0; alpha < d_; ++alpha)
    for (int beta = 0; beta < d_; ++beta)
      for (int gamma = 0; gamma < d_; ++gamma)
        for (int eps = 0; eps < d_; ++eps) {
          double sum = 0.0;
          for (int delta = 0; delta < d_; ++delta) {
            sum += c(alpha, beta, delta) * c(delta, gamma, eps) +
                   c(beta, gamma, delta) * c(delta, alpha, eps) +
                   c(gamma, alpha, delta) * c(delta, beta, eps);
          }
          worst = std::max(worst, std::abs(sum));
        }
  return worst;
}

StructureConstants structure_constants(int k) { return StructureConstants(k); }

GroupElement::GroupElement(int k, Eigen::MatrixXd m) : k_(k), m_(std::move(m)) {
  require_rank(k);
  const int n = 2 * k;
  if (m_.rows() != n || m_.cols() != n)
    throw std::invalid_argument("group element must be a 2k x 2k matrix");
  if (!m_.allFinite()) throw std::invalid_argument("group element has non-finite entries");
  const double ortho = (m_.transpose() * m_ - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
  if (ortho > 1e-12)
    throw std::invalid_argument("matrix is not orthogonal: ||M^T M - I|| = " + std::to_string(ortho));
  if (m_.determinant() < 0.0)
    throw std::invalid_argument("matrix has determinant -1, not in SO(2k)");
}

GroupElement GroupElement::identity(int k) {
  return GroupElement(k, Eigen::MatrixXd::Identity(2 * k, 2 * k));
}

double invariant_metric(const AlgElement& x, const AlgElement& y) {
  require_same_k(x, y);
  return x.dot(y);
}

AlgElement coadjoint_act(const GroupElement& g, const AlgElement& xi) {
  if (g.k() != xi.k()) throw std::invalid_argument("rank mismatch between group element and xi");
  const Eigen::MatrixXd m = g.matrix() * xi.to_matrix() * g.matrix().transpose();
  return AlgElement::from_matrix(m, xi.k());
}

GroupElement random_rotation(int k, std::uint64_t seed) {
  require_rank(k);
  const int n = 2 * k;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = gauss(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  if (q.determinant() < 0.0) q.col(0) *= -1.0;
  return GroupElement(k, q);
}

}  // namespace micz
