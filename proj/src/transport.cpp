#include "koiter_fsi/transport.hpp"

#include <cmath>
#include <numbers>

#include "koiter_fsi/error.hpp"
#include "koiter_fsi/quadrature.hpp"

namespace kfsi {

TransportMatrices assemble_transport_system(const ScalarFrame& f, bool check_condition) {
  TransportMatrices m;
  const Eigen::MatrixXd Wphi = f.W.asDiagonal() * f.phi;
  m.M = f.phi.transpose() * Wphi;
  m.M = 0.5 * (m.M + m.M.transpose());
  const Eigen::VectorXd rx = f.W.cwiseProduct(f.wx - f.Vx);
  const Eigen::VectorXd ry = f.W.cwiseProduct(f.wy - f.Vy);
  m.D = f.gx.transpose() * (rx.asDiagonal() * f.phi) + f.gy.transpose() * (ry.asDiagonal() * f.phi);
  m.K = f.gx.transpose() * (f.W.asDiagonal() * f.gx) + f.gy.transpose() * (f.W.asDiagonal() * f.gy);
  if (check_condition) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.M, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > 1e12)
      throw Error(ErrorKind::SingularMass, "transport mass matrix condition number above 1e12");
  }
  return m;
}

TransportSolver::TransportSolver(double epsilon, double reject_below, int max_halvings)
    : eps_(epsilon), reject_below_(reject_below), max_halvings_(max_halvings) {}

Eigen::VectorXd TransportSolver::project(const Eigen::VectorXd& nodal_values, const ScalarFrame& f) const {
  const Eigen::MatrixXd M = f.phi.transpose() * (f.W.asDiagonal() * f.phi);
  const Eigen::VectorXd rhs = f.phi.transpose() * f.W.cwiseProduct(nodal_values);
  return M.ldlt().solve(rhs);
}

Eigen::VectorXd TransportSolver::advance(const Eigen::VectorXd& beta0, const ScalarFrame& f0,
                                         const ScalarFrame& fm, const ScalarFrame& f1, double dt,
                                         double* dissipation) const {
  const Eigen::MatrixXd M0 = f0.phi.transpose() * (f0.W.asDiagonal() * f0.phi);
  const Eigen::MatrixXd M1 = f1.phi.transpose() * (f1.W.asDiagonal() * f1.phi);
  const TransportMatrices mm = assemble_transport_system(fm, false);
  const Eigen::MatrixXd A = mm.D - eps_ * mm.K;
  const Eigen::MatrixXd lhs = 0.5 * (M1 + M1.transpose()) - 0.5 * dt * A;
  const Eigen::VectorXd rhs = 0.5 * (M0 + M0.transpose()) * beta0 + 0.5 * dt * (A * beta0);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(lhs);
  Eigen::VectorXd beta1 = lu.solve(rhs);
  if (!beta1.allFinite() || (lhs * beta1 - rhs).norm() > 1e-8 * (1.0 + rhs.norm()))
    throw Error(ErrorKind::LinearSolveFailure, "transport step solve failed");
  if (dissipation) {
    const Eigen::VectorXd bm = 0.5 * (beta0 + beta1);
    *dissipation += dt * eps_ * bm.dot(mm.K * bm);
  }
  return beta1;
}

Eigen::VectorXd TransportSolver::advance_static(const Eigen::VectorXd& beta0, const TransportMatrices& m,
                                                double dt, int steps) const {
  const Eigen::MatrixXd A = m.D - eps_ * m.K;
  const Eigen::MatrixXd lhs = m.M - 0.5 * dt * A;
  const Eigen::MatrixXd rhs = m.M + 0.5 * dt * A;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(lhs);
  Eigen::VectorXd b = beta0;
  for (int s = 0; s < steps; ++s) b = lu.solve(rhs * b);
  if (!b.allFinite()) throw Error(ErrorKind::LinearSolveFailure, "transport step solve failed");
  return b;
}

TransportStep TransportSolver::step(const Eigen::VectorXd& beta0, const FrameProvider& frames,
                                    double t0, double dt) const {
  TransportStep out;
  for (int level = 0; level <= max_halvings_; ++level) {
    const int sub = 1 << level;
    const double h = dt / sub;
    Eigen::VectorXd b = beta0;
    double diss = 0.0;
    ScalarFrame fa = frames(t0);
    double min_rho = 1e300;
    for (int s = 0; s < sub; ++s) {
      const double ta = t0 + s * h;
      const ScalarFrame fm = frames(ta + 0.5 * h);
      ScalarFrame fb = frames(ta + h);
      b = advance(b, fa, fm, fb, h, &diss);
      min_rho = std::min(min_rho, nonnegativity_check(b, fb));
      fa = std::move(fb);
    }
    out.beta = b;
    out.min_density = min_rho;
    out.dissipation = diss;
    out.substeps = sub;
    if (min_rho >= reject_below_) return out;
  }
  out.flagged = true;
  return out;
}

double total_mass(const Eigen::VectorXd& beta, const ScalarFrame& f) {
  return f.W.dot(f.phi * beta);
}

double nonnegativity_check(const Eigen::VectorXd& beta, const ScalarFrame& f) {
  double m = (f.phi * beta).minCoeff();
  if (f.sample.rows() > 0) m = std::min(m, (f.sample * beta).minCoeff());
  return m;
}

Renormalizer Renormalizer::identity() {
  return {[](double z) { return z; }, [](double) { return 1.0; }, [](double) { return 0.0; }};
}

Renormalizer Renormalizer::smoothed_square(double knee) {
  const double K = knee;
  auto d2 = [K](double z) {
    if (z <= K) return 2.0;
    if (z >= 2.0 * K) return 0.0;
    const double x = (z - K) / K;
    return 2.0 * (1.0 - x * x * x * (10.0 + x * (-15.0 + 6.0 * x)));
  };
  static const Rule1D g = gauss_legendre(16);
  auto integrate = [](const std::function<double(double)>& f, double a, double b) {
    double s = 0.0;
    for (std::size_t q = 0; q < g.size(); ++q)
      s += 0.5 * (b - a) * g.w[q] * f(0.5 * (a + b) + 0.5 * (b - a) * g.x[q]);
    return s;
  };
  auto d1 = [K, d2, integrate](double z) {
    if (z <= K) return 2.0 * z;
    return 2.0 * K + integrate(d2, K, std::min(z, 2.0 * K));
  };
  auto th = [K, d1, integrate](double z) {
    if (z <= K) return z * z;
    const double z2 = std::min(z, 2.0 * K);
    double v = K * K + integrate(d1, K, z2);
    if (z > z2) v += d1(2.0 * K) * (z - z2);
    return v;
  };
  return {th, d1, d2};
}

Renormalizer Renormalizer::negative_part(double n) {
  auto th = [n](double z) {
    if (z >= 0.0) return 0.0;
    if (z >= -1.0 / n) return 0.5 * n * z * z;
    return -z - 0.5 / n;
  };
  auto d1 = [n](double z) {
    if (z >= 0.0) return 0.0;
    if (z >= -1.0 / n) return n * z;
    return -1.0;
  };
  auto d2 = [n](double z) { return (z < 0.0 && z >= -1.0 / n) ? n : 0.0; };
  return {th, d1, d2};
}

RenormalizedTerms renormalized_residual(const TransportTrajectory& traj, const Renormalizer& th,
                                        const SpaceTimeTest& psi, const SpaceTimeGradient& grad_psi,
                                        const SpaceTimeTest& dpsi_dt) {
  RenormalizedTerms out;
  const std::size_t n = traj.t.size();
  auto boundary_term = [&](std::size_t i) {
    const ScalarFrame f = traj.frames(traj.t[i]);
    const Eigen::VectorXd rho = f.phi * traj.beta[i];
    double s = 0.0;
    for (Eigen::Index q = 0; q < rho.size(); ++q)
      s += f.W[q] * th.theta(rho[q]) * psi(traj.t[i], Vec2(f.px[q], f.py[q]));
    return s;
  };
  out.lhs = boundary_term(n - 1) - boundary_term(0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double dt = traj.t[i + 1] - traj.t[i];
    const double tm = 0.5 * (traj.t[i] + traj.t[i + 1]);
    const ScalarFrame f = traj.frames(tm);
    const Eigen::VectorXd bm = 0.5 * (traj.beta[i] + traj.beta[i + 1]);
    const Eigen::VectorXd rho = f.phi * bm;
    const Eigen::VectorXd rx = f.gx * bm;
    const Eigen::VectorXd ry = f.gy * bm;
    double lhs = 0.0, rhs = 0.0;
    for (Eigen::Index q = 0; q < rho.size(); ++q) {
      const Vec2 x(f.px[q], f.py[q]);
      const double r = rho[q];
      const double p = psi(tm, x);
      const Vec2 gp = grad_psi(tm, x);
      const double divw = f.divw.size() ? f.divw[q] : 0.0;
      const double grad2 = rx[q] * rx[q] + ry[q] * ry[q];
      lhs -= f.W[q] * th.theta(r) * dpsi_dt(tm, x);
      rhs += f.W[q] * (-(r * th.d1(r) - th.theta(r)) * divw * p +
                       th.theta(r) * (f.wx[q] * gp.x() + f.wy[q] * gp.y()) -
                       traj.epsilon * th.d1(r) * (rx[q] * gp.x() + ry[q] * gp.y()) -
                       traj.epsilon * th.d2(r) * grad2 * p);
    }
    out.lhs += dt * lhs;
    out.rhs += dt * rhs;
  }
  out.residual = std::abs(out.lhs - out.rhs);
  return out;
}

ScalarFrame square_cosine_frame(int modes, int cells, int order) {
  const double pi = std::numbers::pi;
  const Rule1D r = composite_gauss(0.0, 1.0, cells, order);
  std::vector<std::pair<int, int>> idx;
  for (int d = 0; d < modes; ++d)
    for (int i = d; i >= 0; --i) idx.emplace_back(i, d - i);
  const int n = static_cast<int>(r.size() * r.size());
  const int nb = static_cast<int>(idx.size());
  ScalarFrame f;
  f.W.resize(n);
  f.phi.resize(n, nb);
  f.gx.resize(n, nb);
  f.gy.resize(n, nb);
  f.px.resize(n);
  f.py.resize(n);
  int q = 0;
  for (std::size_t a = 0; a < r.size(); ++a)
    for (std::size_t b = 0; b < r.size(); ++b, ++q) {
      const double x = r.x[a], y = r.x[b];
      f.W[q] = r.w[a] * r.w[b];
      f.px[q] = x;
      f.py[q] = y;
      for (int k = 0; k < nb; ++k) {
        const auto [i, j] = idx[k];
        const double cx = std::cos(i * pi * x), cy = std::cos(j * pi * y);
        f.phi(q, k) = cx * cy;
        f.gx(q, k) = -i * pi * std::sin(i * pi * x) * cy;
        f.gy(q, k) = -j * pi * cx * std::sin(j * pi * y);
      }
    }
  f.wx = Eigen::VectorXd::Zero(n);
  f.wy = Eigen::VectorXd::Zero(n);
  f.Vx = Eigen::VectorXd::Zero(n);
  f.Vy = Eigen::VectorXd::Zero(n);
  f.divw = Eigen::VectorXd::Zero(n);
  return f;
}

}  // namespace kfsi
