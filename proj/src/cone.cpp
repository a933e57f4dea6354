#include "micz/cone.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace micz {

AlgElement sigma_plus(int k) {
  AlgElement e(k);
  for (int a = 1; a <= k; ++a) e.add_coeff(2 * a - 1, 2 * a, 1.0);
  return e;
}

AlgElement sigma_minus(int k) {
  AlgElement e = sigma_plus(k);
  e.add_coeff(2 * k - 1, 2 * k, -2.0);
  return e;
}

double casimir_Q(const AlgElement& xi) { return xi.squared_norm() / xi.k(); }

double cone_residual(const AlgElement& xi) {
  const Eigen::MatrixXd m = xi.to_matrix();
  const int n = 2 * xi.k();
  const double q = casimir_Q(xi);
  const Eigen::MatrixXd e = m.transpose() * m - q * Eigen::MatrixXd::Identity(n, n);
  return e.cwiseAbs().maxCoeff() / std::max(1.0, xi.squared_norm());
}

bool cone_membership(const AlgElement& xi, double tol) {
  if (tol <= 0.0) throw std::invalid_argument("cone membership tolerance must be positive");
  return cone_residual(xi) <= tol;
}

namespace {

double pfaffian_rec(const Eigen::MatrixXd& m, std::vector<int>& idx) {
  const std::size_t sz = idx.size();
  if (sz == 0) return 1.0;
  const int first = idx[0];
  double sum = 0.0;
  for (std::size_t j = 1; j < sz; ++j) {
    const double mij = m(first, idx[j]);
    if (mij == 0.0) continue;
    std::vector<int> rest;
    rest.reserve(sz - 2);
    for (std::size_t t = 1; t < sz; ++t)
      if (t != j) rest.push_back(idx[t]);
    const double sign = (j % 2 == 1) ? 1.0 : -1.0;
    sum += sign * mij * pfaffian_rec(m, rest);
  }
  return sum;
}

}  // namespace

double pfaffian(const Eigen::MatrixXd& skew) {
  if (skew.rows() != skew.cols() || skew.rows() % 2 != 0)
    throw std::invalid_argument("pfaffian requires an even-dimensional square matrix");
  std::vector<int> idx(skew.rows());
  for (int i = 0; i < skew.rows(); ++i) idx[i] = i;
  return pfaffian_rec(skew, idx);
}

double charge(const AlgElement& xi, double membership_tol) {
  if (!cone_membership(xi, membership_tol))
    throw std::domain_error("charge is defined only on the magnetic cone (residual " +
                            std::to_string(cone_residual(xi)) + ")");
  const double norm = xi.norm();
  if (norm == 0.0) return 0.0;
  return pfaffian(xi.to_matrix()) >= 0.0 ? norm : -norm;
}

ConePoint sample_orbit_point(int k, double mu, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("rank parameter k must be >= 1");
  if (mu == 0.0) return {AlgElement::zero(k), 0.0};
  const AlgElement base = mu > 0.0 ? sigma_plus(k) : sigma_minus(k);
  const GroupElement g = random_rotation(k, seed);
  AlgElement xi = coadjoint_act(g, base);
  xi *= std::abs(mu) / std::sqrt(static_cast<double>(k));
  return {xi, mu};
}

}  // namespace micz
