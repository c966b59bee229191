#include <doctest.h>

#include <cmath>
#include <numbers>

#include "koiter_fsi/error.hpp"
#include "koiter_fsi/geometry.hpp"
#include "koiter_fsi/oracles.hpp"
#include "koiter_fsi/shell.hpp"

using namespace kfsi;

namespace {
const double pi = std::numbers::pi;

ReferenceDomain small_disk(bool covers = false) {
  DomainOptions o;
  o.angular_cells = 8;
  o.shell_covers_boundary = covers;
  return ReferenceDomain(o);
}
}  // namespace

TEST_CASE("closest point on the unit circle") {
  const ReferenceDomain ref = small_disk();
  const Vec2 x(0.6, 0.8 * 1.2);
  const TubeCoordinates tc = closest_point_decomposition(x, ref);
  // radial projection by hand
  const Vec2 q = x / x.norm();
  CHECK((tc.q - q).norm() < 1e-14);
  CHECK(tc.s == doctest::Approx(x.norm() - 1.0).epsilon(1e-14));
  CHECK((tc.q + tc.s * ref.normal(tc.theta) - x).norm() < 1e-14);
  CHECK_THROWS_AS(closest_point_decomposition(Vec2(0.1, 0.0), ref), Error);
}

TEST_CASE("zero displacement gives the identity chart") {
  const ReferenceDomain ref = small_disk();
  const DomainChart ch(ref, RayDisplacement::zero());
  for (double r : {0.1, 0.7, 0.99}) {
    const Vec2 x = r * Vec2(std::cos(1.1), std::sin(1.1));
    CHECK((ch.psi(x) - x).norm() < 1e-15);
    CHECK(ch.jac_det(x) == doctest::Approx(1.0));
  }
}

TEST_CASE("chart jacobian against finite differences") {
  const ReferenceDomain ref = small_disk();
  const ShellBasis sb(3, ref.shell_length());
  Eigen::VectorXd c(3);
  c << 0.12, -0.04, 0.02;
  const DomainChart ch = build_chart(ref, modal_ray_displacement(sb, ref, c));
  const std::function<Vec2(const Vec2&)> map = [&](const Vec2& x) -> Vec2 { return ch.psi(x); };
  for (double r : {0.3, 0.7, 0.9, 0.999})
    for (double th : {0.2, 1.5, 2.9, 4.5}) {
      const Vec2 x = r * Vec2(std::cos(th), std::sin(th));
      const Mat2 fd = oracle::jacobian(map, x, 1e-4);
      CHECK((ch.jacobian(x) - fd).cwiseAbs().maxCoeff() < 1e-6);
      CHECK(ch.jac_det(x) == doctest::Approx(fd.determinant()).epsilon(1e-6));
      CHECK((ch.psi_inverse(ch.psi(x)) - x).norm() < 1e-10);
    }
  CHECK(ch.min_jacobian() > 0.0);
}

TEST_CASE("uniform expansion: area and boundary") {
  const ReferenceDomain ref = small_disk(true);
  const double c = 0.1;
  const DomainChart ch(ref, RayDisplacement::constant(c));
  const double area = integrate_moving([](const Vec2&) { return 1.0; }, ch);
  CHECK(area == doctest::Approx(pi * (1.0 + c) * (1.0 + c)).epsilon(1e-12));
  const double second = integrate_moving([](const Vec2& y) { return y.squaredNorm(); }, ch);
  CHECK(second == doctest::Approx(pi * std::pow(1.0 + c, 4) / 2.0).epsilon(1e-6));
  CHECK(ch.boundary_point(0.7).norm() == doctest::Approx(1.0 + c));
}

TEST_CASE("reynolds transport on the expanding disk converges at second order") {
  const ReferenceDomain ref = [] {
    DomainOptions o;
    o.angular_cells = 8;
    o.layer_cells = 6;
    o.shell_covers_boundary = true;
    return ReferenceDomain(o);
  }();
  DisplacementTrajectory eta = [](double t) { return RayDisplacement::constant(0.1 * std::sin(t), 0.1 * std::cos(t)); };
  SpaceTimeField g = [](double t, const Vec2& y) { return std::exp(0.5 * t) * (1.0 + y.x() * y.x() + 0.3 * y.y()); };
  const double r1 = reynolds_residual(g, eta, ref, 0.5, 0.01).residual;
  const double r2 = reynolds_residual(g, eta, ref, 0.5, 0.005).residual;
  CHECK(r2 < 1e-5);
  CHECK(std::log2(r1 / r2) > 1.9);
}

TEST_CASE("circle tube is injective up to its radius") {
  ParametricCurve circle;
  circle.point = [](double t) -> Vec2 { return Vec2(std::cos(t), std::sin(t)); };
  circle.derivative = [](double t) -> Vec2 { return Vec2(-std::sin(t), std::cos(t)); };
  circle.second_derivative = [](double t) -> Vec2 { return Vec2(-std::cos(t), -std::sin(t)); };
  CHECK(tube_injectivity_defect(circle, 0.5, 48, 5) < 1e-10);
  const Vec2 n = curve_normal(circle, 0.3);
  CHECK((n - Vec2(std::cos(0.3), std::sin(0.3))).norm() < 1e-14);
}

TEST_CASE("too large displacement is refused") {
  const ReferenceDomain ref = small_disk();
  CHECK_THROWS_AS(build_chart(ref, RayDisplacement::constant(0.3)), Error);
  CHECK_NOTHROW(build_chart(ref, RayDisplacement::constant(0.2)));
}
