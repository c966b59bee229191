#include "koiter_fsi/momentum.hpp"

#include <cmath>

#include "koiter_fsi/error.hpp"

namespace kfsi {

void FluidParams::validate() const {
  if (!(mu > 0.0)) throw Error(ErrorKind::ValidationError, "fluid.mu positive");
  if (!(lambda + 2.0 * mu / 3.0 > 0.0))
    throw Error(ErrorKind::ValidationError, "fluid.lambda + 2 mu / 3 positive");
  if (!(a > 0.0)) throw Error(ErrorKind::ValidationError, "fluid.a positive");
  if (!(gamma > 1.0)) throw Error(ErrorKind::ValidationError, "fluid.gamma greater than one");
  if (delta < 0.0) throw Error(ErrorKind::ValidationError, "layers.delta nonnegative");
  if (!(beta >= 4.0)) throw Error(ErrorKind::ValidationError, "layers.beta at least 4");
  if (epsilon < 0.0) throw Error(ErrorKind::ValidationError, "layers.epsilon nonnegative");
  if (kappa < 0.0) throw Error(ErrorKind::ValidationError, "layers.kappa nonnegative");
}

double FluidParams::pressure(double rho) const {
  const double r = std::abs(rho);
  return a * std::pow(r, gamma) + (delta > 0.0 ? delta * std::pow(r, beta) : 0.0);
}

double FluidParams::internal_gamma(double rho) const {
  return a / (gamma - 1.0) * std::pow(std::abs(rho), gamma);
}

double FluidParams::internal_beta(double rho) const {
  return delta > 0.0 ? delta / (beta - 1.0) * std::pow(std::abs(rho), beta) : 0.0;
}

double FluidParams::internal_d2(double rho) const {
  const double r = std::abs(rho);
  double v = a * gamma * std::pow(r, gamma - 2.0);
  if (delta > 0.0) v += delta * beta * std::pow(r, beta - 2.0);
  return v;
}

GalerkinSpace::GalerkinSpace(const ReferenceDomain& ref, const ShellBasis& shell,
                             int density_degree, int velocity_degree)
    : ref_(&ref),
      shell_(&shell),
      density_(density_degree, ref.radius()),
      velocity_(velocity_degree, shell, ref) {
  const auto pts = interior_points(ref);
  rho_ref_ = density_.table(pts);
  u_ref_ = velocity_.table(pts);
  velocity_.boundary_values(ref, bux_, buy_);
}

Frame make_frame(const GalerkinSpace& space, const DomainChart& chart, double t) {
  Frame f;
  f.t = t;
  f.geo = frame_geometry(chart);
  f.rho = push_forward(space.density_table(), f.geo);
  f.u = push_forward(space.velocity_table(), f.geo);
  return f;
}

void velocity_at_nodes(const Frame& f, const Eigen::VectorXd& alpha, Eigen::VectorXd& ux,
                       Eigen::VectorXd& uy) {
  ux = f.u.ux * alpha;
  uy = f.u.uy * alpha;
}

Eigen::VectorXd divergence_at_nodes(const Frame& f, const Eigen::VectorXd& alpha) {
  return f.u.dxx * alpha + f.u.dyy * alpha;
}

ScalarFrame scalar_frame(const Frame& f, const Eigen::VectorXd& drift) {
  ScalarFrame s;
  const Eigen::Index n = f.geo.W.size();
  s.W = f.geo.W;
  s.phi = f.rho.val;
  s.gx = f.rho.gx;
  s.gy = f.rho.gy;
  if (drift.size() > 0) {
    velocity_at_nodes(f, drift, s.wx, s.wy);
    s.divw = divergence_at_nodes(f, drift);
  } else {
    s.wx = Eigen::VectorXd::Zero(n);
    s.wy = Eigen::VectorXd::Zero(n);
    s.divw = Eigen::VectorXd::Zero(n);
  }
  s.Vx = f.geo.Vx;
  s.Vy = f.geo.Vy;
  s.px.resize(n);
  s.py.resize(n);
  for (Eigen::Index q = 0; q < n; ++q) {
    s.px[q] = f.geo.y[q].x();
    s.py[q] = f.geo.y[q].y();
  }
  return s;
}

Eigen::MatrixXd velocity_gram(const Frame& f) {
  const auto& W = f.geo.W;
  return f.u.ux.transpose() * (W.asDiagonal() * f.u.ux) + f.u.uy.transpose() * (W.asDiagonal() * f.u.uy);
}

Eigen::MatrixXd inertia_matrix(const GalerkinSpace& space, const Frame& f,
                               const Eigen::VectorXd& rho_nodal, double kappa) {
  const Eigen::VectorXd w = f.geo.W.cwiseProduct((rho_nodal.array() + kappa).matrix());
  Eigen::MatrixXd A = f.u.ux.transpose() * (w.asDiagonal() * f.u.ux) +
                      f.u.uy.transpose() * (w.asDiagonal() * f.u.uy);
  const auto& E = space.shell_embedding();
  A += E * E.transpose();
  A = 0.5 * (A + A.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::NotSPD, "momentum inertia matrix has a nonpositive pivot");
  return A;
}

Eigen::VectorXd shell_load_vector(const ShellBasis& shell, const ShellLoad& g, double t) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(shell.size());
  if (!g) return v;
  const Rule1D& r = shell.rule();
  for (std::size_t q = 0; q < r.size(); ++q) v += r.w[q] * g(t, r.x[q]) * shell.values(r.x[q]);
  return v;
}

MomentumOperators assemble_momentum(const GalerkinSpace& space, const Frame& fm,
                                    const MidpointData& d, const FluidParams& p,
                                    const BodyForce& f, const ShellLoad& g) {
  const auto& W = fm.geo.W;
  const auto& T = fm.u;
  const Eigen::Index n = W.size();
  const Eigen::VectorXd Wr = W.cwiseProduct(d.rho);
  const Eigen::VectorXd ax = Wr.cwiseProduct(d.wx - fm.geo.Vx);
  const Eigen::VectorXd ay = Wr.cwiseProduct(d.wy - fm.geo.Vy);
  MomentumOperators ops;
  ops.convective = T.ux.transpose() * (ax.asDiagonal() * T.dxx + ay.asDiagonal() * T.dxy) +
                   T.uy.transpose() * (ax.asDiagonal() * T.dyx + ay.asDiagonal() * T.dyy);
  const Eigen::MatrixXd* grads[4] = {&T.dxx, &T.dxy, &T.dyx, &T.dyy};
  const int N = space.n_velocity();
  ops.eps_mass = Eigen::MatrixXd::Zero(N, N);
  ops.viscous = Eigen::MatrixXd::Zero(N, N);
  for (const auto* G : grads) {
    ops.eps_mass += G->transpose() * (Wr.asDiagonal() * *G);
    ops.viscous += G->transpose() * (W.asDiagonal() * *G);
  }
  const Eigen::VectorXd Wx = W.cwiseProduct(d.rho_x);
  const Eigen::VectorXd Wy = W.cwiseProduct(d.rho_y);
  ops.eps_cross = T.dxx.transpose() * (Wx.asDiagonal() * T.ux) + T.dxy.transpose() * (Wy.asDiagonal() * T.ux) +
                  T.dyx.transpose() * (Wx.asDiagonal() * T.uy) + T.dyy.transpose() * (Wy.asDiagonal() * T.uy);
  const Eigen::MatrixXd dv = T.dxx + T.dyy;
  ops.div = dv.transpose() * (W.asDiagonal() * dv);
  Eigen::VectorXd pw(n);
  for (Eigen::Index q = 0; q < n; ++q) pw[q] = W[q] * p.pressure(d.rho[q]);
  ops.pressure = dv.transpose() * pw;
  ops.force = Eigen::VectorXd::Zero(N);
  if (f) {
    Eigen::VectorXd fx(n), fy(n);
    for (Eigen::Index q = 0; q < n; ++q) {
      const Vec2 v = f(fm.t, fm.geo.y[q]);
      fx[q] = Wr[q] * v.x();
      fy[q] = Wr[q] * v.y();
    }
    ops.force += T.ux.transpose() * fx + T.uy.transpose() * fy;
  }
  if (g) ops.force += space.shell_embedding() * shell_load_vector(space.shell(), g, fm.t);
  return ops;
}

Eigen::MatrixXd MomentumOperators::dissipative_matrix(const FluidParams& p) const {
  return p.epsilon * eps_mass + p.mu * viscous + (p.lambda + p.mu) * div;
}

Eigen::MatrixXd MomentumOperators::operator_matrix(const FluidParams& p) const {
  return 0.5 * (convective - convective.transpose()) +
         0.5 * p.epsilon * (eps_cross - eps_cross.transpose()) + dissipative_matrix(p);
}

double StepEnergy::residual() const {
  const double e1 = kinetic1 + shell_kinetic1 + elastic1;
  const double e0 = kinetic0 + shell_kinetic0 + elastic0;
  return e1 - e0 + dissipation - force_work - pressure_work;
}

MomentumSolver::MomentumSolver(const GalerkinSpace& space, ShellParams shell, FluidParams fluid,
                               bool shell_only)
    : space_(&space), shell_(shell), fluid_(fluid), shell_only_(shell_only) {
  shell_.validate();
  S_ = space.shell().stiffness(shell_);
  EY_ = space.shell_embedding();
}

MomentumStepResult MomentumSolver::step(const MomentumState& s0, const Eigen::MatrixXd& A0,
                                        const Eigen::MatrixXd& A1, const MomentumOperators& ops,
                                        double dt) const {
  const int N = space_->n_velocity();
  Eigen::MatrixXd R = ops.operator_matrix(fluid_);
  Eigen::MatrixXd Dm = ops.dissipative_matrix(fluid_);
  Eigen::VectorXd P = ops.pressure;
  Eigen::VectorXd F = ops.force;
  Eigen::MatrixXd a0 = A0, a1 = A1;
  if (shell_only_) {
    const Eigen::MatrixXd proj = EY_ * EY_.transpose();
    a0 = proj;
    a1 = proj;
    R.setZero();
    Dm.setZero();
    P.setZero();
    F = proj * F;
  }
  const Eigen::MatrixXd Q = EY_ * S_ * EY_.transpose();
  const Eigen::MatrixXd dA = (a1 - a0) / (4.0 * dt);
  Eigen::MatrixXd lhs = a1 / dt - dA + 0.5 * R + 0.25 * dt * Q;
  Eigen::VectorXd rhs = P + F + a0 * s0.alpha / dt + dA * s0.alpha - 0.5 * (R * s0.alpha) -
                        EY_ * (S_ * s0.c) - 0.25 * dt * (Q * s0.alpha);
  if (shell_only_) {
    // Fluid slots are frozen at zero.
    const Eigen::MatrixXd proj = EY_ * EY_.transpose();
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(N, N);
    lhs = proj * lhs * proj + (I - proj);
    rhs = proj * rhs;
  }
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(lhs);
  MomentumStepResult out;
  out.state.alpha = lu.solve(rhs);
  if (!out.state.alpha.allFinite() || (lhs * out.state.alpha - rhs).norm() > 1e-8 * (1.0 + rhs.norm()))
    throw Error(ErrorKind::LinearSolveFailure, "momentum step solve failed");
  const Eigen::VectorXd am = 0.5 * (s0.alpha + out.state.alpha);
  out.state.c = s0.c + dt * EY_.transpose() * am;

  StepEnergy& e = out.energy;
  const Eigen::MatrixXd shellpart = EY_ * EY_.transpose();
  e.kinetic0 = 0.5 * s0.alpha.dot((a0 - shellpart) * s0.alpha);
  e.kinetic1 = 0.5 * out.state.alpha.dot((a1 - shellpart) * out.state.alpha);
  e.shell_kinetic0 = 0.5 * (EY_.transpose() * s0.alpha).squaredNorm();
  e.shell_kinetic1 = 0.5 * (EY_.transpose() * out.state.alpha).squaredNorm();
  e.elastic0 = 0.5 * s0.c.dot(S_ * s0.c);
  e.elastic1 = 0.5 * out.state.c.dot(S_ * out.state.c);
  e.dissipation = dt * am.dot(Dm * am);
  e.force_work = dt * am.dot(F);
  e.pressure_work = dt * am.dot(P);
  return out;
}

Eigen::VectorXd project_velocity(const GalerkinSpace& space, const Frame& f,
                                 const Eigen::VectorXd& rho_nodal, double kappa,
                                 const Eigen::VectorXd& eta_dot, const Eigen::VectorXd& ux,
                                 const Eigen::VectorXd& uy) {
  const int N = space.n_velocity();
  const auto& E = space.shell_embedding();
  Eigen::VectorXd alpha = E * eta_dot;
  const Eigen::Index n = f.geo.W.size();
  const Eigen::VectorXd rx = ux - f.u.ux * alpha;
  const Eigen::VectorXd ry = uy - f.u.uy * alpha;
  std::vector<int> xs;
  for (int k = 0; k < N; ++k)
    if (!space.velocity().is_shell(k)) xs.push_back(k);
  const Eigen::VectorXd w = f.geo.W.cwiseProduct((rho_nodal.array() + kappa).matrix());
  Eigen::MatrixXd Ux(n, xs.size()), Uy(n, xs.size());
  for (std::size_t j = 0; j < xs.size(); ++j) {
    Ux.col(j) = f.u.ux.col(xs[j]);
    Uy.col(j) = f.u.uy.col(xs[j]);
  }
  const Eigen::MatrixXd G = Ux.transpose() * (w.asDiagonal() * Ux) + Uy.transpose() * (w.asDiagonal() * Uy);
  const Eigen::VectorXd b = Ux.transpose() * w.cwiseProduct(rx) + Uy.transpose() * w.cwiseProduct(ry);
  const Eigen::VectorXd ax = G.ldlt().solve(b);
  for (std::size_t j = 0; j < xs.size(); ++j) alpha[xs[j]] = ax[j];
  return alpha;
}

double trace_residual(const GalerkinSpace& space, const Eigen::VectorXd& alpha,
                      const Eigen::VectorXd& eta_dot) {
  const auto& ref = space.reference();
  const Eigen::VectorXd ux = space.boundary_ux() * alpha;
  const Eigen::VectorXd uy = space.boundary_uy() * alpha;
  double s = 0.0;
  for (std::size_t q = 0; q < ref.boundary().size(); ++q) {
    const auto& b = ref.boundary()[q];
    const double v = b.on_shell ? space.shell().evaluate(eta_dot, ref.shell_coordinate(b.theta)) : 0.0;
    const Vec2 target = v * ref.normal(b.theta);
    s += b.weight * ((ux[q] - target.x()) * (ux[q] - target.x()) + (uy[q] - target.y()) * (uy[q] - target.y()));
  }
  return std::sqrt(s);
}

double trace_residual(const GalerkinSpace& space, const std::function<Vec2(const Vec2&)>& u_ref,
                      const Eigen::VectorXd& eta_dot) {
  const auto& ref = space.reference();
  double s = 0.0;
  for (const auto& b : ref.boundary()) {
    const Vec2 val = u_ref ? u_ref(b.x) : Vec2::Zero();
    const double v = b.on_shell ? space.shell().evaluate(eta_dot, ref.shell_coordinate(b.theta)) : 0.0;
    s += b.weight * (val - v * ref.normal(b.theta)).squaredNorm();
  }
  return std::sqrt(s);
}

}  // namespace kfsi
