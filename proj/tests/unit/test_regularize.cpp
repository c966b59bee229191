#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "koiter_fsi/quadrature.hpp"
#include "koiter_fsi/regularize.hpp"

using namespace kfsi;

TEST_CASE("bump has unit mass and compact support") {
  const Rule1D g = composite_gauss(-1.0, 1.0, 8, 8);
  double m = 0.0;
  for (std::size_t q = 0; q < g.size(); ++q) m += g.w[q] * bump(g.x[q]);
  CHECK(m == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(bump(1.0) == 0.0);
  CHECK(bump(-1.5) == 0.0);
}

TEST_CASE("one-sided kernels and ramp") {
  MollifierConfig cfg;
  cfg.kappa = 0.05;
  cfg.horizon = 1.0;
  const Mollifier m(cfg);
  CHECK(m.tau_minus(0.01) == 0.0);
  CHECK(m.tau_plus(-0.01) == 0.0);
  CHECK(m.tau_minus(-0.02) > 0.0);
  CHECK(m.psi(0.1) == 0.0);
  CHECK(m.psi(0.9) == 1.0);
  CHECK(m.psi(0.5) > 0.0);
  CHECK(m.psi(0.5) < 1.0);
}

namespace {
BoundaryTrajectory sample(int nt, int ns, double T, double ell) {
  BoundaryTrajectory z(nt, ns);
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < ns; ++j)
      z(i, j) = 0.2 + std::sin(std::numbers::pi * j * ell / ns) * std::cos(3.0 * i * T / (nt - 1));
  return z;
}
}  // namespace

TEST_CASE("maximum principle") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  BoundaryTrajectory z(101, 32);
  for (int i = 0; i < z.rows(); ++i)
    for (int j = 0; j < z.cols(); ++j) z(i, j) = u(rng);
  MollifierConfig cfg;
  cfg.kappa = 0.04;
  const BoundaryTrajectory r = mollify_displacement(z, cfg);
  CHECK(r.cwiseAbs().maxCoeff() <= z.cwiseAbs().maxCoeff());
}

TEST_CASE("uniform convergence as kappa shrinks") {
  MollifierConfig cfg;
  const BoundaryTrajectory z = sample(801, 64, 1.0, 2.0);
  double prev = 1e300;
  for (double k : {0.08, 0.04, 0.02, 0.01}) {
    cfg.kappa = k;
    const double e = (mollify_displacement(z, cfg) - z).cwiseAbs().maxCoeff();
    CHECK(e < prev);
    prev = e;
  }
}

TEST_CASE("time derivative commutes away from the blend") {
  MollifierConfig cfg;
  cfg.kappa = 0.05;
  const int nt = 2001, ns = 32;
  const BoundaryTrajectory z = sample(nt, ns, 1.0, 2.0);
  BoundaryTrajectory zt(nt, ns);
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < ns; ++j)
      zt(i, j) = -3.0 * std::sin(std::numbers::pi * j * 2.0 / ns) * std::sin(3.0 * i / (nt - 1.0));
  const BoundaryTrajectory a = mollify_displacement_rate(z, cfg);
  const BoundaryTrajectory b = mollify_displacement(zt, cfg);
  const Mollifier m(cfg);
  double worst = 0.0;
  for (int i = 0; i < nt; ++i) {
    const double t = i / (nt - 1.0);
    if (t < cfg.kappa || t > 1.0 - cfg.kappa || m.psi_derivative(t) != 0.0) continue;
    worst = std::max(worst, (a.row(i) - b.row(i)).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("space-time mollifier is symmetric") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SpaceTimeGrid a, b, chi;
  for (SpaceTimeGrid* g : {&a, &b, &chi}) {
    g->nt = 9;
    g->nx = 11;
    g->ny = 10;
    g->dt = g->dx = g->dy = 0.1;
    g->values.resize(9 * 11 * 10);
  }
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    a.values[i] = u(rng);
    b.values[i] = u(rng);
    chi.values[i] = 1.0;
  }
  const double lhs = grid_pairing(mollify_field(a, chi, 0.15), b, chi);
  const double rhs = grid_pairing(a, mollify_field(b, chi, 0.15), chi);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("time convolution matrix") {
  const Eigen::MatrixXd T = time_convolution_matrix(20, 0.01, 0.035);
  CHECK((T - T.transpose()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(T.minCoeff() >= 0.0);
  CHECK(T.rowwise().sum().maxCoeff() <= 1.0 + 1e-14);
  const Eigen::MatrixXd I = time_convolution_matrix(5, 0.01, 0.005);
  CHECK((I - Eigen::MatrixXd::Identity(5, 5)).norm() == 0.0);
}
