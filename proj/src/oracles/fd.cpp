#include "koiter_fsi/oracles.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>

#include "koiter_fsi/error.hpp"

namespace kfsi::oracle {

namespace {

// ∂⁴ with w = w' = 0 at both ends: ghost w₋₁ = w₁ gives the 7, −4, 1 first row.
Eigen::MatrixXd clamped_d4(int n, double h) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  const double s = 1.0 / (h * h * h * h);
  for (int i = 0; i < n; ++i) {
    A(i, i) = 6.0 * s;
    if (i >= 1) A(i, i - 1) = -4.0 * s;
    if (i + 1 < n) A(i, i + 1) = -4.0 * s;
    if (i >= 2) A(i, i - 2) = s;
    if (i + 2 < n) A(i, i + 2) = s;
  }
  A(0, 0) = 7.0 * s;
  A(n - 1, n - 1) = 7.0 * s;
  return A;
}

Eigen::MatrixXd dirichlet_d2(int n, double h) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    A(i, i) = -2.0 / (h * h);
    if (i >= 1) A(i, i - 1) = 1.0 / (h * h);
    if (i + 1 < n) A(i, i + 1) = 1.0 / (h * h);
  }
  return A;
}

}  // namespace

std::vector<double> clamped_beam_eigenvalues(int points, double length, int count) {
  const double h = length / (points + 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(clamped_d4(points, h), Eigen::EigenvaluesOnly);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + points);
  std::sort(ev.begin(), ev.end());
  ev.resize(std::min(count, points));
  return ev;
}

BeamProfile static_beam(int points, double length, double m, double b2, double b0,
                        const std::function<double(double)>& load) {
  const double h = length / (points + 1);
  const Eigen::MatrixXd A = m * clamped_d4(points, h) - b2 * dirichlet_d2(points, h) +
                            b0 * Eigen::MatrixXd::Identity(points, points);
  Eigen::VectorXd g(points);
  BeamProfile out;
  for (int i = 0; i < points; ++i) {
    out.a.push_back((i + 1) * h);
    g[i] = load((i + 1) * h);
  }
  const Eigen::VectorXd w = A.ldlt().solve(g);
  out.w.assign(w.data(), w.data() + points);
  return out;
}

Eigen::MatrixXd square_heat_cn(int n, double epsilon, const std::function<double(double, double)>& rho0,
                               double horizon, int steps) {
  const double h = 1.0 / n;
  const double dt = horizon / steps;
  const int N = n * n;
  auto id = [n](int i, int j) { return i * n + j; };
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(5 * N);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double diag = 0.0;
      const int nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
      for (const auto& p : nb) {
        if (p[0] < 0 || p[0] >= n || p[1] < 0 || p[1] >= n) continue;  // reflecting wall
        trip.emplace_back(id(i, j), id(p[0], p[1]), 1.0 / (h * h));
        diag -= 1.0 / (h * h);
      }
      trip.emplace_back(id(i, j), id(i, j), diag);
    }
  Eigen::SparseMatrix<double> L(N, N);
  L.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseMatrix<double> I(N, N);
  I.setIdentity();
  const Eigen::SparseMatrix<double> lhs = I - 0.5 * dt * epsilon * L;
  const Eigen::SparseMatrix<double> rhs = I + 0.5 * dt * epsilon * L;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(lhs);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::LinearSolveFailure, "finite-difference heat factorization failed");
  Eigen::VectorXd u(N);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) u[id(i, j)] = rho0((i + 0.5) * h, (j + 0.5) * h);
  for (int s = 0; s < steps; ++s) u = solver.solve(rhs * u);
  Eigen::MatrixXd out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = u[id(i, j)];
  return out;
}

double laplacian(const std::function<double(const Vec2&)>& f, const Vec2& x, double h) {
  const double c = -30.0 * f(x);
  double s = 2.0 * c;
  for (int d = 0; d < 2; ++d) {
    Vec2 e = Vec2::Zero();
    e[d] = h;
    s += 16.0 * (f(x + e) + f(x - e)) - (f(x + 2.0 * e) + f(x - 2.0 * e));
  }
  return s / (12.0 * h * h);
}

Mat2 jacobian(const std::function<Vec2(const Vec2&)>& map, const Vec2& x, double h) {
  Mat2 J;
  for (int d = 0; d < 2; ++d) {
    Vec2 e = Vec2::Zero();
    e[d] = h;
    J.col(d) = (map(x + e) - map(x - e)) / (2.0 * h);
  }
  return J;
}

}  // namespace kfsi::oracle
