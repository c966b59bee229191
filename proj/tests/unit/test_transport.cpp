#include <doctest.h>

#include <cmath>
#include <numbers>

#include "koiter_fsi/momentum.hpp"
#include "koiter_fsi/oracles.hpp"
#include "koiter_fsi/transport.hpp"

using namespace kfsi;

namespace {
const double pi = std::numbers::pi;
}

TEST_CASE("single cosine mode decays at rate eps pi^2") {
  const ScalarFrame f = square_cosine_frame(4, 4, 6);
  const double eps = 0.05, T = 0.5;
  const int steps = 200;
  const TransportSolver ts(eps);
  Eigen::VectorXd nod(f.W.size());
  for (int q = 0; q < nod.size(); ++q) nod[q] = 1.0 + 0.3 * std::cos(pi * f.px[q]);
  Eigen::VectorXd b = ts.project(nod, f);
  b = ts.advance_static(b, assemble_transport_system(f), T / steps, steps);
  // basis order: (0,0), (1,0), (0,1), ...
  CHECK(b[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(b[1] == doctest::Approx(0.3 * std::exp(-eps * pi * pi * T)).epsilon(1e-5));
}

TEST_CASE("galerkin square against crank-nicolson") {
  auto rho0 = [](double x, double y) { return 1.0 + std::exp(-((x - 0.3) * (x - 0.3) + (y - 0.5) * (y - 0.5)) / 0.05); };
  const Eigen::MatrixXd fd = oracle::square_heat_cn(128, 0.02, rho0, 0.1, 20);
  const int modes = 12;
  const ScalarFrame f = square_cosine_frame(modes, 8, 6);
  const TransportSolver ts(0.02);
  Eigen::VectorXd nod(f.W.size());
  for (int q = 0; q < nod.size(); ++q) nod[q] = rho0(f.px[q], f.py[q]);
  const Eigen::VectorXd b = ts.advance_static(ts.project(nod, f), assemble_transport_system(f), 0.005, 20);
  double num = 0.0, den = 0.0;
  for (int i = 0; i < 128; ++i)
    for (int j = 0; j < 128; ++j) {
      const double x = (i + 0.5) / 128, y = (j + 0.5) / 128;
      double g = 0.0;
      int k = 0;
      for (int d = 0; d < modes; ++d)
        for (int a = d; a >= 0; --a) g += b[k++] * std::cos(a * pi * x) * std::cos((d - a) * pi * y);
      num += (g - fd(i, j)) * (g - fd(i, j));
      den += fd(i, j) * fd(i, j);
    }
  CHECK(std::sqrt(num / den) < 0.05);
}

TEST_CASE("mass is conserved on a moving disk with drift") {
  DomainOptions o;
  o.angular_cells = 8;
  const ReferenceDomain ref(o);
  const ShellBasis sb(3, ref.shell_length());
  const GalerkinSpace space(ref, sb, 3, 3);
  Eigen::VectorXd alpha(space.n_velocity());
  for (int k = 0; k < alpha.size(); ++k) alpha[k] = 0.2 * std::cos(k + 0.5);
  FrameProvider frames = [&](double t) {
    Eigen::VectorXd c(3), r(3);
    c << 0.1 * std::sin(3.0 * t), 0.0, 0.02 * t;
    r << 0.3 * std::cos(3.0 * t), 0.0, 0.02;
    return scalar_frame(make_frame(space, DomainChart(ref, modal_ray_displacement(sb, ref, c, r)), t), alpha);
  };
  const TransportSolver ts(0.01, -1e-8);
  ScalarFrame f = frames(0.0);
  Eigen::VectorXd nod(f.W.size());
  for (int q = 0; q < nod.size(); ++q) nod[q] = 1.0 + 0.4 * f.px[q];
  Eigen::VectorXd b = ts.project(nod, f);
  const double m0 = total_mass(b, f);
  for (int k = 0; k < 10; ++k) {
    const TransportStep st = ts.step(b, frames, 0.02 * k, 0.02);
    b = st.beta;
    CHECK(st.dissipation >= 0.0);
    CHECK(st.min_density > 0.0);
  }
  f = frames(0.2);
  CHECK(std::abs(total_mass(b, f) - m0) / m0 < 1e-10);
  CHECK(nonnegativity_check(b, f) > 0.0);
}

TEST_CASE("renormalizers") {
  const Renormalizer sq = Renormalizer::smoothed_square(2.0);
  CHECK(sq.theta(1.0) == doctest::Approx(1.0));
  CHECK(sq.d2(10.0) == doctest::Approx(0.0));
  const Renormalizer neg = Renormalizer::negative_part(100.0);
  CHECK(neg.theta(1.0) == doctest::Approx(0.0));
  CHECK(neg.theta(-1.0) == doctest::Approx(1.0).epsilon(1e-2));
  const Renormalizer id = Renormalizer::identity();
  CHECK(id.theta(0.7) == 0.7);
  CHECK(id.d1(3.0) == 1.0);
}
