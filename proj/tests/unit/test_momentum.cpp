#include <doctest.h>

#include <cmath>

#include "koiter_fsi/error.hpp"
#include "koiter_fsi/momentum.hpp"

using namespace kfsi;

TEST_CASE("pressure law and internal energies") {
  FluidParams p;
  p.a = 2.0;
  p.gamma = 1.5;
  p.delta = 0.1;
  p.beta = 4.0;
  const double r = 1.3;
  CHECK(p.pressure(r) == doctest::Approx(2.0 * std::pow(r, 1.5) + 0.1 * std::pow(r, 4.0)));
  CHECK(p.internal_gamma(r) == doctest::Approx(2.0 / 0.5 * std::pow(r, 1.5)));
  CHECK(p.internal_beta(r) == doctest::Approx(0.1 / 3.0 * std::pow(r, 4.0)));
  // P'' = p'/ρ by central differences
  const double h = 1e-4;
  const double d2 = (p.internal_gamma(r + h) + p.internal_beta(r + h) - 2.0 * (p.internal_gamma(r) + p.internal_beta(r)) +
                     p.internal_gamma(r - h) + p.internal_beta(r - h)) / (h * h);
  CHECK(p.internal_d2(r) == doctest::Approx(d2).epsilon(1e-6));
}

TEST_CASE("fluid parameter validation") {
  FluidParams p;
  p.mu = -1.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = FluidParams{};
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("inertia matrix is SPD and trace of the basis matches the shell") {
  DomainOptions o;
  o.angular_cells = 8;
  const ReferenceDomain ref(o);
  const ShellBasis sb(3, ref.shell_length());
  const GalerkinSpace space(ref, sb, 3, 3);
  const Frame f = make_frame(space, DomainChart(ref, RayDisplacement::zero()), 0.0);
  const Eigen::VectorXd rho = Eigen::VectorXd::Constant(f.geo.y.size(), 1.0);
  const Eigen::MatrixXd A = inertia_matrix(space, f, rho, 1e-3);
  CHECK((A - A.transpose()).cwiseAbs().maxCoeff() < 1e-10);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  CHECK(es.eigenvalues().minCoeff() > 0.0);

  Eigen::VectorXd eta_dot(3);
  eta_dot << 0.3, -0.1, 0.2;
  const Eigen::VectorXd alpha = space.shell_embedding() * eta_dot;
  CHECK(trace_residual(space, alpha, eta_dot) < 1e-10);
  CHECK(trace_residual(space, alpha, 2.0 * eta_dot) > 1e-3);
}

TEST_CASE("dissipative matrix is positive semidefinite") {
  DomainOptions o;
  o.angular_cells = 8;
  const ReferenceDomain ref(o);
  const ShellBasis sb(3, ref.shell_length());
  const GalerkinSpace space(ref, sb, 3, 3);
  const Frame f = make_frame(space, DomainChart(ref, RayDisplacement::zero()), 0.0);
  MidpointData d;
  const std::size_t n = f.geo.y.size();
  d.rho = Eigen::VectorXd::Constant(n, 1.0);
  d.rho_x = d.rho_y = Eigen::VectorXd::Zero(n);
  d.wx = d.wy = Eigen::VectorXd::Zero(n);
  FluidParams p;
  const MomentumOperators ops = assemble_momentum(space, f, d, p, nullptr, nullptr);
  const Eigen::MatrixXd D = ops.dissipative_matrix(p);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (D + D.transpose()));
  CHECK(es.eigenvalues().minCoeff() > -1e-10);
  // no forcing
  CHECK(ops.force.norm() == 0.0);
}
