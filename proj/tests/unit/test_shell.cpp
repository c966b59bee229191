#include <doctest.h>

#include <cmath>

#include "koiter_fsi/oracles.hpp"
#include "koiter_fsi/shell.hpp"

using namespace kfsi;

namespace {
// roots of cos x cosh x = 1 by bisection
double beam_root(double lo, double hi) {
  auto f = [](double x) { return std::cos(x) * std::cosh(x) - 1.0; };
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (lo + hi);
    (f(lo) * f(m) <= 0.0 ? hi : lo) = m;
  }
  return 0.5 * (lo + hi);
}
}  // namespace

TEST_CASE("clamped beam roots") {
  const std::vector<double> r = clamped_beam_roots(3);
  CHECK(r[0] == doctest::Approx(beam_root(4.0, 5.0)).epsilon(1e-12));
  CHECK(r[1] == doctest::Approx(beam_root(7.0, 8.0)).epsilon(1e-12));
  CHECK(r[2] == doctest::Approx(beam_root(10.5, 11.5)).epsilon(1e-12));
}

TEST_CASE("modes are orthonormal and clamped") {
  const ShellBasis sb(5, 2.0);
  CHECK((sb.mass_gram() - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-10);
  for (int k = 0; k < 5; ++k) {
    CHECK(std::abs(sb.value(k, 0.0)) < 1e-9);
    CHECK(std::abs(sb.value(k, 2.0)) < 1e-8);
    CHECK(std::abs(sb.value(k, 0.0, 1)) < 1e-8);
  }
}

TEST_CASE("spectrum against the finite-difference beam") {
  const double L = 3.0;
  const ShellBasis sb(4, L);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(sb.curvature_gram(), sb.mass_gram());
  const std::vector<double> fd = oracle::clamped_beam_eigenvalues(256, L, 3);
  for (int k = 0; k < 3; ++k) CHECK(es.eigenvalues()[k] == doctest::Approx(fd[k]).epsilon(0.01));
}

TEST_CASE("koiter energy is quadratic") {
  const ShellBasis sb(4, 2.0);
  const ShellParams p{2.0, 0.0, 0.0};
  Eigen::VectorXd c(4);
  c << 0.1, -0.2, 0.05, 0.3;
  double e = 0.0;
  for (int k = 0; k < 4; ++k) e += 0.5 * p.m * sb.eigenvalue(k) * c[k] * c[k];
  CHECK(koiter_energy(c, sb, p) == doctest::Approx(e).epsilon(1e-8));
  CHECK(koiter_energy(2.0 * c, sb, p) == doctest::Approx(4.0 * e).epsilon(1e-12));
}

TEST_CASE("static deflection against the finite-difference beam") {
  const double L = 2.0;
  const ShellBasis sb(8, L);
  const ShellParams p{1.0, 0.5, 1.0};
  auto load = [](double a) { return 1.0 + a; };
  Eigen::VectorXd rhs = sb.project(load);
  const Eigen::VectorXd c = sb.stiffness(p).ldlt().solve(sb.mass_gram() * rhs);
  const oracle::BeamProfile fd = oracle::static_beam(256, L, p.m, p.b2, p.b0, load);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < fd.a.size(); ++i) {
    num += std::pow(sb.evaluate(c, fd.a[i]) - fd.w[i], 2);
    den += fd.w[i] * fd.w[i];
  }
  CHECK(std::sqrt(num / den) < 0.01);
}
