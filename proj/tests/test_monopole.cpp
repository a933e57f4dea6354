#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "micz/monopole.hpp"
#include "support.hpp"

#include <cmath>

using namespace micz;

namespace {

// north-pole position (0, ..., 0, r)
Eigen::VectorXd pole(int k, double r) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(2 * k + 1);
  x[2 * k] = r;
  return x;
}

int levi_civita3(int i, int j, int l) {
  if (i == j || j == l || i == l) return 0;
  if ((i == 0 && j == 1 && l == 2) || (i == 1 && j == 2 && l == 0) ||
      (i == 2 && j == 0 && l == 1))
    return 1;
  return -1;
}

}  // namespace

TEST_CASE("chart guard") {
  Eigen::VectorXd x = pole(1, 1.0);
  CHECK(chart_q(x) == doctest::Approx(2.0));
  x[2] = -1.0;  // on the singular ray
  CHECK_THROWS_AS(gauge_potential(x, 1), ChartSingularityError);
  try {
    gauge_potential(x, 1);
  } catch (const ChartSingularityError& e) {
    CHECK(e.q() == doctest::Approx(0.0));
    CHECK(e.q_min() == doctest::Approx(kDefaultChartGuard));
  }
  CHECK_THROWS_AS(gauge_potential(Eigen::VectorXd::Zero(3), 1), std::invalid_argument);
  CHECK_THROWS_AS(gauge_potential(Eigen::VectorXd::Zero(4), 1), std::invalid_argument);
}

TEST_CASE("gauge potential structure") {
  auto rng = testing::make_rng(31);
  for (int k : {1, 2, 3}) {
    const int n = 2 * k + 1;
    SUBCASE("vanishes at the pole") {
      const GaugePotential pot = gauge_potential(pole(k, 1.3), k);
      for (int j = 0; j < n; ++j) CHECK(pot.components[j].max_abs() < 1e-15);
    }
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::VectorXd x = testing::random_chart_position(k, rng);
      const GaugePotential pot = gauge_potential(x, k);
      // last component always zero
      CHECK(pot.components[n - 1].max_abs() == 0.0);
      // transversality sum_j x_j A_j = 0
      AlgElement xa = AlgElement::zero(k);
      for (int j = 0; j < n; ++j) xa += x[j] * pot.components[j];
      CHECK(xa.max_abs() < 1e-12);
    }
  }
}

TEST_CASE("field strength at the pole") {
  const int k = 2;
  const double r = 1.7;
  const FieldStrength f = field_strength(pole(k, r), k);
  const int n = 2 * k + 1;
  for (int a = 0; a < n - 1; ++a) {
    CHECK(f.at(n - 1, a).max_abs() < 1e-15);  // F_nb = 0 at the pole
    for (int b = a + 1; b < n - 1; ++b) {
      // F_ab = -gamma_ab / r^2
      AlgElement expect = AlgElement::basis(a + 1, b + 1, k);
      expect *= -1.0 / (r * r);
      CHECK((f.at(a, b) - expect).max_abs() < 1e-15);
    }
  }
}

TEST_CASE("field strength is antisymmetric and transversal") {
  auto rng = testing::make_rng(32);
  for (int k : {1, 2, 3}) {
    const int n = 2 * k + 1;
    for (int trial = 0; trial < 15; ++trial) {
      const Eigen::VectorXd x = testing::random_chart_position(k, rng);
      const FieldStrength f = field_strength(x, k);
      for (int j = 0; j < n; ++j) {
        CHECK(f.at(j, j).max_abs() == 0.0);
        for (int m = 0; m < n; ++m)
          CHECK((f.at(j, m) + f.at(m, j)).max_abs() < 1e-15);
      }
      for (int m = 0; m < n; ++m) {
        AlgElement xf = AlgElement::zero(k);
        for (int j = 0; j < n; ++j) xf += x[j] * f.at(j, m);
        CHECK(xf.max_abs() < 1e-12);
      }
    }
  }
}

TEST_CASE("k=1 closed form: F_jl(x, xi) = -mu eps_jlm x_m / r^3") {
  auto rng = testing::make_rng(33);
  SUBCASE("pole example") {
    // x = (0,0,1), xi = sigma_+: F_12 = -1
    const Eigen::MatrixXd fs = field_scalar(pole(1, 1.0), sigma_plus(1));
    CHECK(fs(0, 1) == doctest::Approx(-1.0));
  }
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::VectorXd x = testing::random_chart_position(1, rng);
    AlgElement xi(1);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    const double mu = unif(rng);
    xi.add_coeff(1, 2, mu);
    const Eigen::MatrixXd fs = field_scalar(x, xi);
    const double r3 = std::pow(x.norm(), 3);
    for (int j = 0; j < 3; ++j)
      for (int l = 0; l < 3; ++l) {
        double expect = 0.0;
        for (int m = 0; m < 3; ++m) expect -= mu * levi_civita3(j, l, m) * x[m] / r3;
        CHECK(fs(j, l) == doctest::Approx(expect).epsilon(1e-12));
      }
  }
}

TEST_CASE("field scalar is linear in xi") {
  auto rng = testing::make_rng(34);
  const int k = 2;
  const Eigen::VectorXd x = testing::random_chart_position(k, rng);
  CHECK(field_scalar(x, AlgElement::zero(k)).cwiseAbs().maxCoeff() == 0.0);
  const AlgElement xi1 = testing::random_element(k, rng);
  const AlgElement xi2 = testing::random_element(k, rng);
  const Eigen::MatrixXd lhs = field_scalar(x, xi1 + 2.0 * xi2);
  const Eigen::MatrixXd rhs = field_scalar(x, xi1) + 2.0 * field_scalar(x, xi2);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("analytic monopole derivatives match central differences") {
  auto rng = testing::make_rng(35);
  for (int k : {1, 2}) {
    const int n = 2 * k + 1;
    const Eigen::VectorXd x = testing::random_chart_position(k, rng);
    const MonopoleDerivatives der = monopole_derivatives(x, k);
    const double h = 1e-6 * x.norm();
    for (int l = 0; l < n; ++l) {
      Eigen::VectorXd xp = x, xm = x;
      xp[l] += h;
      xm[l] -= h;
      const GaugePotential ap = gauge_potential(xp, k);
      const GaugePotential am = gauge_potential(xm, k);
      const FieldStrength fp = field_strength(xp, k);
      const FieldStrength fm = field_strength(xm, k);
      for (int b = 0; b < n; ++b) {
        AlgElement fd = ap.components[b] - am.components[b];
        fd *= 1.0 / (2.0 * h);
        CHECK((fd - der.dA_at(l, b)).max_abs() < 1e-8);
      }
      for (int j = 0; j < n; ++j)
        for (int m = 0; m < n; ++m) {
          AlgElement fd = fp.at(j, m) - fm.at(j, m);
          fd *= 1.0 / (2.0 * h);
          CHECK((fd - der.dF_at(l, j, m)).max_abs() < 1e-8);
        }
    }
  }
}

TEST_CASE("covariant derivative: three routes agree") {
  auto rng = testing::make_rng(36);
  for (int k : {1, 2, 3}) {
    const int n = 2 * k + 1;
    for (int trial = 0; trial < 5; ++trial) {
      const Eigen::VectorXd x = testing::random_chart_position(k, rng);
      const auto nabla = covariant_derivative_F(x, k);
      const auto rhs = covariant_derivative_F_rhs(x, k);
      const auto fd = covariant_derivative_F_fd(x, k);
      double d_rhs = 0.0, d_fd = 0.0, scale = 0.0;
      for (std::size_t t = 0; t < nabla.size(); ++t) {
        d_rhs = std::max(d_rhs, (nabla[t] - rhs[t]).max_abs());
        d_fd = std::max(d_fd, (nabla[t] - fd[t]).max_abs());
        scale = std::max(scale, rhs[t].max_abs());
      }
      CHECK(d_rhs / std::max(1.0, scale) < 1e-10);
      CHECK(d_fd / std::max(1.0, scale) < 1e-6);

      // divergence identity sum_j nabla_j F_jm = 0
      for (int m = 0; m < n; ++m) {
        AlgElement div = AlgElement::zero(k);
        for (int j = 0; j < n; ++j)
          if (j != m) div += nabla[(static_cast<std::size_t>(j) * n + j) * n + m];
        CHECK(div.max_abs() / std::max(1.0, scale) < 1e-10);
      }
    }
  }
}

TEST_CASE("covariant derivative scales as lambda^-3") {
  auto rng = testing::make_rng(37);
  const int k = 2;
  const Eigen::VectorXd x = testing::random_chart_position(k, rng);
  const double lam = 1.9;
  const auto base = covariant_derivative_F(x, k);
  const auto scaled = covariant_derivative_F(lam * x, k);
  for (std::size_t t = 0; t < base.size(); ++t) {
    AlgElement expect = base[t];
    expect *= std::pow(lam, -3.0);
    CHECK((scaled[t] - expect).max_abs() < 1e-12);
  }
}

TEST_CASE("norm identity r^4 sum F^2 = 2kQ for arbitrary xi") {
  auto rng = testing::make_rng(38);
  for (int k : {1, 2, 3}) {
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::VectorXd x = testing::random_chart_position(k, rng);
      const AlgElement xi = testing::random_element(k, rng);  // cone not needed here
      const Eigen::MatrixXd fs = field_scalar(x, xi);
      const double r2 = x.squaredNorm();
      CHECK(r2 * r2 * fs.squaredNorm() ==
            doctest::Approx(2.0 * k * casimir_Q(xi)).epsilon(1e-11));
    }
  }
}

TEST_CASE("cone criterion: F.F identity holds on the cone, fails off it") {
  auto rng = testing::make_rng(39);
  const int k = 2;
  const int n = 2 * k + 1;
  const Eigen::VectorXd x = testing::random_chart_position(k, rng);
  const FieldStrength field = field_strength(x, k);
  const double r2 = x.squaredNorm();
  auto residual = [&](const AlgElement& xi) {
    const Eigen::MatrixXd fs = field_scalar(field, xi);
    Eigen::MatrixXd e = r2 * r2 * fs.transpose() * fs;
    e -= casimir_Q(xi) * (Eigen::MatrixXd::Identity(n, n) - x * x.transpose() / r2);
    return e.cwiseAbs().maxCoeff() / std::max(1.0, casimir_Q(xi));
  };
  CHECK(residual(testing::random_cone_xi(k, rng)) < 1e-12);
  CHECK(residual(AlgElement::zero(k)) == 0.0);
  AlgElement off(k);
  off.add_coeff(1, 2, 1.0);
  off.add_coeff(3, 4, 2.0);
  CHECK(residual(off) > 1e-2);
}

TEST_CASE("rotations about the pole axis leave the scalar invariants alone") {
  auto rng = testing::make_rng(40);
  const int k = 2;
  const int n = 2 * k + 1;
  const Eigen::VectorXd x = testing::random_chart_position(k, rng);
  const AlgElement xi = testing::random_element(k, rng);

  // rotation of R^n fixing the x_n axis, built from an SO(2k) block
  Eigen::MatrixXd rot = Eigen::MatrixXd::Identity(n, n);
  rot.topLeftCorner(n - 1, n - 1) = random_rotation(k, rng()).matrix();
  const Eigen::VectorXd xr = rot * x;

  const double r2 = x.squaredNorm();
  auto fnorm = [&](const Eigen::VectorXd& pos) {
    const Eigen::MatrixXd fs = field_scalar(pos, xi);
    return r2 * r2 * fs.squaredNorm();
  };
  auto id4_frobenius = [&](const Eigen::VectorXd& pos) {
    const Eigen::MatrixXd fs = field_scalar(pos, xi);
    Eigen::MatrixXd e = r2 * r2 * fs.transpose() * fs;
    e -= casimir_Q(xi) * (Eigen::MatrixXd::Identity(n, n) - pos * pos.transpose() / r2);
    return e.norm();
  };
  CHECK(fnorm(xr) == doctest::Approx(fnorm(x)).epsilon(1e-10));
  CHECK(id4_frobenius(xr) == doctest::Approx(id4_frobenius(x)).epsilon(1e-10));
}

TEST_CASE("verification suite passes at small k") {
  const VerificationReport r1 = verify_monopole_identities(40, 1, 7, 1e-9);
  CHECK(r1.pass());
  CHECK(r1.k == 1);
  const VerificationReport r2 = verify_monopole_identities(25, 2, 7, 1e-9);
  CHECK(r2.pass());
  // the negative control must be present and must have triggered for k >= 2
  bool found = false;
  for (const auto& c : r2.checks)
    if (c.negative_control) {
      found = true;
      CHECK(c.pass);
      CHECK(c.residual >= 1e-3);
    }
  CHECK(found);
  CHECK_THROWS_AS(verify_monopole_identities(0, 1, 7, 1e-9), std::invalid_argument);
}

TEST_CASE("verification report serializes") {
  const VerificationReport r = verify_monopole_identities(5, 1, 3, 1e-9);
  const std::string json = r.to_json_string();
  CHECK(json.find("\"suite\"") != std::string::npos);
  CHECK(json.find("monopole_identities") != std::string::npos);
  CHECK(json.find("max_residual") != std::string::npos);
}
