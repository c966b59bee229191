#include "koiter_fsi/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "koiter_fsi/error.hpp"
#include "koiter_fsi/regularize.hpp"

namespace kfsi {

void CouplingConfig::validate() const {
  if (!(theta_mix > 0.0 && theta_mix <= 1.0))
    throw Error(ErrorKind::ValidationError, "coupling.theta_mix in (0, 1]");
  if (!(tol > 0.0)) throw Error(ErrorKind::ValidationError, "coupling.tol positive");
  if (max_iters < 1) throw Error(ErrorKind::ValidationError, "coupling.max_iters at least 1");
  if (window < 0.0) throw Error(ErrorKind::ValidationError, "coupling.window nonnegative");
  if (!(guard_fraction > 0.0 && guard_fraction < 0.5))
    throw Error(ErrorKind::ValidationError, "guard.fraction in (0, 0.5)");
  if (!(jacobian_floor > 0.0)) throw Error(ErrorKind::ValidationError, "guard.jacobian_floor positive");
}

double RestartReport::mass_change() const {
  return std::abs(mass_after - mass_before) / std::max(std::abs(mass_before), 1e-300);
}

double RestartReport::energy_change() const {
  return std::abs(energy_after - energy_before) / std::max(std::abs(energy_before), 1e-300);
}

std::string to_string(GuardReason r) {
  switch (r) {
    case GuardReason::None: return "none";
    case GuardReason::Displacement: return "displacement";
    case GuardReason::Jacobian: return "jacobian";
  }
  return "none";
}

GuardReason self_intersection_guard(double eta_sup, double jac_min, double tube_width,
                                    double fraction, double jac_floor) {
  if (eta_sup >= fraction * tube_width) return GuardReason::Displacement;
  if (jac_min <= jac_floor) return GuardReason::Jacobian;
  return GuardReason::None;
}

namespace {

Eigen::VectorXd nodal(const Eigen::MatrixXd& table, const Eigen::VectorXd& coeffs) { return table * coeffs; }

// Row-normalized symmetric kernel over the window.
Eigen::MatrixXd window_kernel(int n, double dt, double kappa) {
  Eigen::MatrixXd T = time_convolution_matrix(n, dt, kappa);
  for (int i = 0; i < n; ++i) {
    const double s = T.row(i).sum();
    if (s > 0.0) T.row(i) /= s;
  }
  return T;
}

}  // namespace

CoupledSolver::CoupledSolver(ProblemData data) : data_(std::move(data)) {
  data_.fluid.validate();
  data_.shell.validate();
  data_.coupling.validate();
  if (!(data_.dt > 0.0)) throw Error(ErrorKind::ValidationError, "time.dt positive");
  if (!(data_.horizon > 0.0)) throw Error(ErrorKind::ValidationError, "time.T positive");
  if (data_.n_shell < 1) throw Error(ErrorKind::ValidationError, "shell.modes at least 1");
  if (data_.density_degree < 0 || data_.velocity_degree < 0)
    throw Error(ErrorKind::ValidationError, "basis degrees nonnegative");
  if (!(data_.domain.radius > 0.0 && data_.domain.tube_width > 0.0 &&
        data_.domain.tube_width < data_.domain.radius))
    throw Error(ErrorKind::ValidationError, "domain.tube_width in (0, radius)");

  ref_ = std::make_unique<ReferenceDomain>(data_.domain);
  shell_ = std::make_unique<ShellBasis>(data_.n_shell, ref_->shell_length());
  space_ = std::make_unique<GalerkinSpace>(*ref_, *shell_, data_.density_degree, data_.velocity_degree);
  momentum_ = std::make_unique<MomentumSolver>(*space_, data_.shell, data_.fluid, data_.shell_only);

  const int ns = data_.n_shell;
  if (data_.eta0.size() == 0) data_.eta0 = Eigen::VectorXd::Zero(ns);
  if (data_.eta1.size() == 0) data_.eta1 = Eigen::VectorXd::Zero(ns);
  if (data_.eta0.size() != ns || data_.eta1.size() != ns)
    throw Error(ErrorKind::ValidationError, "initial shell coefficients must match shell.modes");

  if (data_.lift_u0) {
    const VelocityBasis* vb = &space_->velocity();
    auto extra = data_.u0;
    const Eigen::VectorXd e1 = data_.eta1;
    data_.u0 = [vb, extra, e1](const Vec2& x) {
      Vec2 u = extra ? extra(x) : Vec2::Zero();
      for (int j = 0; j < e1.size(); ++j) {
        Vec2 val;
        Mat2 grad;
        vb->eval(vb->slot_of_shell(j), x, val, grad);
        u += e1[j] * val;
      }
      return u;
    };
    data_.lift_u0 = false;
  }

  const auto pts = interior_points(*ref_);
  Eigen::VectorXd rho(pts.size()), ux(pts.size()), uy(pts.size());
  for (std::size_t q = 0; q < pts.size(); ++q) {
    rho[q] = data_.rho0 ? data_.rho0(pts[q]) : 1.0;
    if (!(rho[q] >= 0.0)) throw Error(ErrorKind::ValidationError, "rho0 nonnegative");
    const Vec2 u = data_.u0 ? data_.u0(pts[q]) : Vec2::Zero();
    ux[q] = u.x();
    uy[q] = u.y();
  }
  const double tr = trace_residual(*space_, data_.u0, data_.eta1);
  if (tr > 1e-8)
    throw Error(ErrorKind::CompatibilityViolation,
                "compatibility: u0 trace differs from eta1 normal velocity (L2 mismatch " +
                    std::to_string(tr) + ")");

  initial_.t = 0.0;
  initial_.c = data_.eta0;
  initial_.geom = data_.eta0;
  initial_.rate = Eigen::VectorXd::Zero(ns);
  initial_.layers = 0;
  const Frame f0 = frame(initial_);
  const TransportSolver ts(data_.fluid.epsilon);
  initial_.beta = ts.project(rho, scalar_frame(f0, {}));
  const Eigen::VectorXd rho_nodal = nodal(f0.rho.val, initial_.beta);
  initial_.alpha = project_velocity(*space_, f0, rho_nodal, data_.fluid.kappa, data_.eta1, ux, uy);
}

Eigen::VectorXd CoupledSolver::base_coefficients(int layers) const {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(data_.n_shell);
  for (int i = 0; i < layers; ++i) b += frozen_[i];
  return b;
}

DomainChart CoupledSolver::chart(const Eigen::VectorXd& c, const Eigen::VectorXd& rate, int layers) const {
  std::vector<RayDisplacement> frozen;
  frozen.reserve(layers);
  for (int i = 0; i < layers; ++i) frozen.push_back(modal_ray_displacement(*shell_, *ref_, frozen_[i]));
  return build_chart(*ref_, modal_ray_displacement(*shell_, *ref_, c - base_coefficients(layers), rate),
                     std::move(frozen));
}

Frame CoupledSolver::frame(const Eigen::VectorXd& c, const Eigen::VectorXd& rate, int layers,
                           double t) const {
  return make_frame(*space_, chart(c, rate, layers), t);
}

Frame CoupledSolver::frame(const LevelState& s) const { return frame(s.geom, {}, s.layers, s.t); }

double CoupledSolver::window_bound(const LevelState& s0) const {
  const DomainChart ch = chart(s0.geom, {}, s0.layers);
  const double m0 = modal_sup(*shell_, s0.geom - base_coefficients(s0.layers));
  return 0.5 * (m0 + 0.5 * ch.moving_tube_width());
}

DecoupledSolution CoupledSolver::solve_decoupled(const LevelState& s0,
                                                 const std::vector<Eigen::VectorXd>& zeta,
                                                 const std::vector<Eigen::VectorXd>& v,
                                                 int steps) const {
  const double dt = data_.dt;
  const FluidParams& fp = data_.fluid;
  const int layers = s0.layers;
  const Eigen::MatrixXd T = window_kernel(steps, dt, fp.kappa);

  // regularized geometry and drift
  std::vector<Eigen::VectorXd> cbar(steps + 1), rate(steps), drift(steps);
  cbar[0] = s0.geom;
  for (int k = 0; k < steps; ++k) {
    Eigen::VectorXd inc = Eigen::VectorXd::Zero(data_.n_shell);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(s0.alpha.size());
    for (int j = 0; j < steps; ++j) {
      if (T(k, j) == 0.0) continue;
      inc += T(k, j) * (zeta[j + 1] - zeta[j]);
      w += T(k, j) * 0.5 * (v[j] + v[j + 1]);
    }
    cbar[k + 1] = cbar[k] + inc;
    rate[k] = inc / dt;
    drift[k] = w;
  }

  DecoupledSolution out;
  out.levels.reserve(steps + 1);
  LevelState first = s0;
  if (steps > 0) first.rate = rate[0];
  out.levels.push_back(first);

  const TransportSolver ts(fp.epsilon, -1e-8);
  const Eigen::VectorXd no_rate;
  Frame F0 = frame(cbar[0], no_rate, layers, s0.t);
  ScalarFrame S0 = scalar_frame(F0, {});
  {
    const Eigen::VectorXd r0 = nodal(F0.rho.val, s0.beta);
    out.inertia.push_back(inertia_matrix(*space_, F0, r0, fp.kappa));
    out.trace_residual.push_back(
        trace_residual(*space_, s0.alpha, space_->shell_embedding().transpose() * s0.alpha));
  }
  const auto& EY = space_->shell_embedding();

  for (int k = 0; k < steps; ++k) {
    const LevelState& cur = out.levels.back();
    const double t0 = cur.t;
    const double tm = t0 + 0.5 * dt;
    const double t1 = t0 + dt;
    Frame Fm = frame(0.5 * (cbar[k] + cbar[k + 1]), rate[k], layers, tm);
    Frame F1 = frame(cbar[k + 1], no_rate, layers, t1);
    const ScalarFrame Sm = scalar_frame(Fm, drift[k]);
    const ScalarFrame S1 = scalar_frame(F1, {});

    const Eigen::VectorXd ck = cbar[k], rk = rate[k], wk = drift[k];
    FrameProvider frames = [&, ck, rk, wk, t0](double t) -> ScalarFrame {
      const double tau = (t - t0) / dt;
      if (std::abs(tau) < 1e-9) return S0;
      if (std::abs(tau - 0.5) < 1e-9) return Sm;
      if (std::abs(tau - 1.0) < 1e-9) return S1;
      const Frame f = frame(ck + tau * dt * rk, rk, layers, t);
      return scalar_frame(f, wk);
    };
    const TransportStep tr = ts.step(cur.beta, frames, t0, dt);

    const Eigen::VectorXd bm = 0.5 * (cur.beta + tr.beta);
    MidpointData md;
    md.rho = nodal(Fm.rho.val, bm);
    md.rho_x = nodal(Fm.rho.gx, bm);
    md.rho_y = nodal(Fm.rho.gy, bm);
    velocity_at_nodes(Fm, wk, md.wx, md.wy);
    const MomentumOperators ops = assemble_momentum(*space_, Fm, md, fp, data_.f, data_.g);
    const Eigen::VectorXd r1 = nodal(F1.rho.val, tr.beta);
    const Eigen::MatrixXd A1 = inertia_matrix(*space_, F1, r1, fp.kappa);
    const MomentumStepResult ms =
        momentum_->step(MomentumState{cur.alpha, cur.c}, out.inertia.back(), A1, ops, dt);

    double idiss = 0.0;
    if (fp.epsilon > 0.0 && !data_.shell_only) {
      for (Eigen::Index q = 0; q < md.rho.size(); ++q)
        idiss += Fm.geo.W[q] * fp.internal_d2(md.rho[q]) *
                 (md.rho_x[q] * md.rho_x[q] + md.rho_y[q] * md.rho_y[q]);
      idiss *= dt * fp.epsilon;
    }

    LevelState next;
    next.t = t1;
    next.beta = tr.beta;
    next.alpha = ms.state.alpha;
    next.c = ms.state.c;
    next.geom = cbar[k + 1];
    next.rate = rk;
    next.layers = layers;
    out.levels.push_back(std::move(next));
    out.energy.push_back(ms.energy);
    out.internal_dissipation.push_back(idiss);
    out.transport_min.push_back(tr.min_density);
    out.inertia.push_back(A1);
    out.trace_residual.push_back(
        trace_residual(*space_, ms.state.alpha, EY.transpose() * ms.state.alpha));
    F0 = std::move(F1);
    S0 = S1;
  }
  return out;
}

WindowResult CoupledSolver::fixed_point_iterate(const LevelState& s0, int steps, int window_index,
                                                std::vector<ConvergenceRow>* history) const {
  const CouplingConfig& cc = data_.coupling;
  const double bound = window_bound(s0);
  const Eigen::VectorXd base = base_coefficients(s0.layers);
  std::vector<Eigen::VectorXd> zeta(steps + 1, s0.c), v(steps + 1, s0.alpha);
  double theta = cc.theta_mix;
  double prev = 0.0;
  WindowResult out;
  for (int it = 1; it <= cc.max_iters; ++it) {
    DecoupledSolution sol = solve_decoupled(s0, zeta, v, steps);
    double du2 = 0.0, deta = 0.0;
    for (int k = 0; k <= steps; ++k) {
      const LevelState& l = sol.levels[k];
      if (modal_sup(*shell_, l.geom - base) > bound || modal_sup(*shell_, l.c - base) > bound)
        throw Error(ErrorKind::WindowShrunk, "displacement left the window bound at t = " + std::to_string(l.t));
      const Eigen::VectorXd d = l.alpha - v[k];
      if (k > 0) du2 += data_.dt * d.dot(sol.inertia[k] * d);
      deta = std::max(deta, modal_sup(*shell_, l.c - zeta[k]));
    }
    const double du = std::sqrt(std::max(du2, 0.0));
    const double res = du + deta;
    ConvergenceRow row{window_index, it, du, deta, it == 1 ? 0.0 : res / std::max(prev, 1e-300)};
    out.history.push_back(row);
    if (history) history->push_back(row);
    out.iterations = it;
    if (res <= cc.tol) {
      out.solution = std::move(sol);
      return out;
    }
    if (it > 1 && row.ratio > 1.0) theta *= 0.5;
    prev = res;
    for (int k = 0; k <= steps; ++k) {
      zeta[k] = (1.0 - theta) * zeta[k] + theta * sol.levels[k].c;
      v[k] = (1.0 - theta) * v[k] + theta * sol.levels[k].alpha;
    }
  }
  throw Error(ErrorKind::NoConvergence,
              "fixed point not reached in " + std::to_string(cc.max_iters) + " iterations");
}

LevelEnergy level_energy(const CoupledSolver& solver, const LevelState& s, const Frame& f) {
  const FluidParams& fp = solver.data().fluid;
  const auto& E = solver.space().shell_embedding();
  LevelEnergy e;
  const Eigen::VectorXd rho = f.rho.val * s.beta;
  e.mass = f.geo.W.dot(rho);
  e.min_density = rho.minCoeff();
  Eigen::VectorXd ux, uy;
  velocity_at_nodes(f, s.alpha, ux, uy);
  for (Eigen::Index q = 0; q < rho.size(); ++q) {
    const double w = f.geo.W[q];
    e.kinetic += 0.5 * w * (rho[q] + fp.kappa) * (ux[q] * ux[q] + uy[q] * uy[q]);
    e.internal_gamma += w * fp.internal_gamma(rho[q]);
    e.internal_beta += w * fp.internal_beta(rho[q]);
  }
  const Eigen::VectorXd eta_dot = E.transpose() * s.alpha;
  e.shell_kinetic = 0.5 * eta_dot.squaredNorm();
  e.shell_elastic = 0.5 * s.c.dot(solver.momentum().shell_stiffness() * s.c);
  return e;
}

LedgerRow CoupledSolver::ledger_row(const LevelState& s) const {
  const Frame f = frame(s);
  const LevelEnergy e = level_energy(*this, s, f);
  LedgerRow r;
  r.t = s.t;
  r.mass = e.mass;
  r.kinetic = e.kinetic;
  r.internal_gamma = e.internal_gamma;
  r.internal_beta = e.internal_beta;
  r.shell_kinetic = e.shell_kinetic;
  r.shell_elastic = e.shell_elastic;
  r.min_density = e.min_density;
  r.eta_sup = modal_sup(*shell_, s.geom);
  r.jac_min = f.geo.min_J;
  r.trace_residual = trace_residual(*space_, s.alpha, space_->shell_embedding().transpose() * s.alpha);
  return r;
}

RestartReport CoupledSolver::continuation_restart(LevelState& s) {
  RestartReport rep;
  const Frame f_old = frame(s);
  const LevelEnergy e_old = level_energy(*this, s, f_old);
  rep.mass_before = e_old.mass;
  rep.energy_before = e_old.total();
  const Eigen::VectorXd inc = s.geom - base_coefficients(s.layers);
  if (modal_sup(*shell_, inc) == 0.0 || s.layers < static_cast<int>(frozen_.size())) {
    rep.mass_after = rep.mass_before;
    rep.energy_after = rep.energy_before;
    rep.new_tube_width = chart(s.geom, {}, s.layers).moving_tube_width();
    return rep;
  }
  const DomainChart old_chart = chart(s.geom, {}, s.layers);
  frozen_.push_back(inc);
  DomainChart new_chart = [&] {
    try {
      return chart(s.geom, {}, s.layers + 1);
    } catch (...) {
      frozen_.pop_back();
      throw;
    }
  }();
  rep.new_tube_width = new_chart.moving_tube_width();

  // injectivity of the tube around the new base curve
  const double R = ref_->radius();
  const DomainChart* nc = &new_chart;
  ParametricCurve curve;
  auto er = [](double th) -> Vec2 { return Vec2(std::cos(th), std::sin(th)); };
  auto et = [](double th) -> Vec2 { return Vec2(-std::sin(th), std::cos(th)); };
  curve.point = [=](double th) -> Vec2 { return (R + nc->ray(th).b) * er(th); };
  curve.derivative = [=](double th) -> Vec2 {
    const RayValues rv = nc->ray(th);
    return rv.b_theta * er(th) + (R + rv.b) * et(th);
  };
  curve.second_derivative = [=](double th) -> Vec2 {
    const double h = 1e-5;
    const double bpp = (nc->ray(th + h).b_theta - nc->ray(th - h).b_theta) / (2.0 * h);
    const RayValues rv = nc->ray(th);
    return (bpp - (R + rv.b)) * er(th) + 2.0 * rv.b_theta * et(th);
  };
  curve.period = 2.0 * std::numbers::pi;
  rep.injectivity_defect = tube_injectivity_defect(curve, rep.new_tube_width, 48, 5);
  if (rep.injectivity_defect > 1e-6) {
    frozen_.pop_back();
    throw Error(ErrorKind::RestartGeometryInvalid,
                "restart tube is not injective (defect " + std::to_string(rep.injectivity_defect) + ")");
  }

  // re-express the state on the new chart
  LevelState ns = s;
  ns.layers = s.layers + 1;
  const Frame f_new = make_frame(*space_, new_chart, s.t);
  const std::size_t n = f_new.geo.y.size();
  Eigen::VectorXd rho(n), ux(n), uy(n);
  const DensityBasis& db = space_->density();
  const VelocityBasis& vb = space_->velocity();
  Eigen::VectorXd v(db.size()), gx(db.size()), gy(db.size());
  for (std::size_t q = 0; q < n; ++q) {
    const Vec2 x = old_chart.psi_inverse(f_new.geo.y[q]);
    db.eval(x, v, gx, gy);
    rho[q] = v.dot(s.beta);
    Vec2 u = Vec2::Zero();
    for (int k = 0; k < vb.size(); ++k) {
      Vec2 val;
      Mat2 grad;
      vb.eval(k, x, val, grad);
      u += s.alpha[k] * val;
    }
    ux[q] = u.x();
    uy[q] = u.y();
  }
  const TransportSolver ts(data_.fluid.epsilon);
  ns.beta = ts.project(rho, scalar_frame(f_new, {}));
  const Eigen::VectorXd rn = f_new.rho.val * ns.beta;
  ns.alpha = project_velocity(*space_, f_new, rn, data_.fluid.kappa,
                              space_->shell_embedding().transpose() * s.alpha, ux, uy);
  const LevelEnergy e_new = level_energy(*this, ns, f_new);
  rep.mass_after = e_new.mass;
  rep.energy_after = e_new.total();
  s = std::move(ns);
  return rep;
}

RunReport CoupledSolver::run() {
  RunReport rep;
  const CouplingConfig& cc = data_.coupling;
  const double dt = data_.dt;
  const int total = std::max(1, static_cast<int>(std::lround(data_.horizon / dt)));
  int window_steps = cc.window > 0.0 ? std::max(1, static_cast<int>(std::lround(cc.window / dt))) : total;

  frozen_.clear();
  LevelState s = initial_;
  LedgerRow r0 = ledger_row(s);
  const double E0 = r0.total_energy();
  rep.ledger.push_back(r0);
  rep.levels.push_back(s);
  double diss = 0.0, work = 0.0;
  double E_prev = E0;

  auto guard = [&](const LedgerRow& r) {
    return self_intersection_guard(r.eta_sup, r.jac_min, data_.domain.tube_width, cc.guard_fraction,
                                   cc.jacobian_floor);
  };
  if (GuardReason g = guard(r0); g != GuardReason::None) {
    rep.status = RunStatus::Guard;
    rep.reason = to_string(g);
    return rep;
  }

  int done = 0;
  while (done < total) {
    const int n = std::min(window_steps, total - done);
    WindowResult wr;
    try {
      wr = fixed_point_iterate(s, n, rep.windows, &rep.convergence);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::WindowShrunk || e.kind() == ErrorKind::DisplacementTooLarge) {
        ++rep.window_shrinks;
        window_steps = n / 2;
        if (window_steps == 0) {
          rep.status = RunStatus::Guard;
          rep.reason = "displacement";
          return rep;
        }
        continue;
      }
      if (e.kind() == ErrorKind::NoConvergence) {
        rep.status = RunStatus::NoConvergence;
        rep.reason = e.what();
        return rep;
      }
      throw;
    }
    ++rep.windows;
    const DecoupledSolution& sol = wr.solution;
    for (int k = 0; k < n; ++k) {
      const StepEnergy& se = sol.energy[k];
      diss += se.dissipation + sol.internal_dissipation[k];
      work += se.force_work;
      const LevelState& l = sol.levels[k + 1];
      LedgerRow r = ledger_row(l);
      r.min_density = std::min(r.min_density, sol.transport_min[k]);
      r.dissipation_cum = diss;
      r.forcing_work_cum = work;
      const double E = r.total_energy();
      r.inequality_residual = E + diss - E0 - work;
      r.step_residual = (E - E_prev) + se.dissipation + sol.internal_dissipation[k] - se.force_work;
      E_prev = E;
      rep.ledger.push_back(r);
      rep.levels.push_back(l);
      if (GuardReason g = guard(r); g != GuardReason::None) {
        rep.status = RunStatus::Guard;
        rep.reason = to_string(g);
        return rep;
      }
    }
    done += n;
    s = sol.levels.back();
    if (cc.restart && done < total) {
      rep.restarts.push_back(continuation_restart(s));
      rep.levels.back() = s;
    }
  }
  return rep;
}

}  // namespace kfsi
