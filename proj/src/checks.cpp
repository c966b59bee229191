#include "koiter_fsi/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

#include "koiter_fsi/diagnostics.hpp"
#include "koiter_fsi/error.hpp"
#include "koiter_fsi/oracles.hpp"
#include "koiter_fsi/output.hpp"
#include "koiter_fsi/regularize.hpp"
#include "koiter_fsi/transport.hpp"

namespace kfsi {

namespace {

const double kPi = std::numbers::pi;

struct SuiteEntry {
  const char* name;
  int criterion;
};

const SuiteEntry kSuites[] = {
    {"mass", 1},           {"nonnegativity", 2}, {"energy", 3},      {"transport-oracle", 4},
    {"shell-spectrum", 5}, {"trace", 6},         {"reynolds", 7},    {"mollifier", 8},
    {"fixed-point", 9},    {"boundary-probe", 10}, {"sweeps", 11},   {"restart", 12},
    {"config-roundtrip", 0}, {"chart", 0},       {"shell-static", 0}, {"guard", 0},
};

int criterion_of(const std::string& suite) {
  for (const auto& s : kSuites)
    if (suite == s.name) return s.criterion;
  return -1;
}

struct Run {
  std::unique_ptr<CoupledSolver> solver;
  RunReport report;
};

// Coupled runs shared between checks, computed on first use.
std::map<std::string, std::shared_ptr<Run>>& run_cache() {
  static std::map<std::string, std::shared_ptr<Run>> cache;
  return cache;
}

std::shared_ptr<Run> cached_run(const std::string& key, const Scenario& s) {
  auto& cache = run_cache();
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto r = std::make_shared<Run>();
  r->solver = std::make_unique<CoupledSolver>(to_problem(s));
  r->report = r->solver->run();
  cache[key] = r;
  return r;
}

Scenario moving_scenario() {
  Scenario s = check_base_scenario();
  s.T = 1.0;  // 100 steps
  return s;
}

Scenario restart_scenario() {
  Scenario s = check_base_scenario();
  s.T = 0.2;
  s.window = 0.1;
  return s;
}

Scenario forced_scenario() {
  Scenario s = check_base_scenario();
  s.T = 0.2;
  s.g = "uniform";
  s.g_amplitude = 0.5;
  s.f = "gravity";
  s.f_amplitude = 0.2;
  return s;
}

Scenario vacuum_scenario() {
  Scenario s = check_base_scenario();
  s.T = 0.1;
  s.rho0 = "cosine";
  s.rho0_value = 1.0;
  s.rho0_amplitude = 0.95;
  s.density_degree = 5;
  return s;
}

double mass_drift(const std::vector<LedgerRow>& ledger) {
  double d = 0.0;
  for (const auto& r : ledger) d = std::max(d, std::abs(r.mass - ledger.front().mass) / ledger.front().mass);
  return d;
}

double min_density(const std::vector<LedgerRow>& ledger) {
  double m = 1e300;
  for (const auto& r : ledger) m = std::min(m, r.min_density);
  return m;
}

double max_trace(const std::vector<LedgerRow>& ledger) {
  double m = 0.0;
  for (const auto& r : ledger) m = std::max(m, r.trace_residual);
  return m;
}

double step_violation_ratio(const std::vector<LedgerRow>& ledger) {
  const EnergyReport e = energy_budget(ledger);
  return e.max_step_violation / e.energy0;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string completed_or(const Run& r) {
  return r.report.status == RunStatus::Completed ? std::string() : " run stopped: " + r.report.reason;
}

// Transport-only runs on the small disk with a prescribed drift.
struct TransportRun {
  double drift = 0.0;
  double min_rho = 1e300;
};

TransportRun transport_disk_run(bool moving, int steps, double dt) {
  DomainOptions o;
  o.angular_cells = 8;
  const ReferenceDomain ref(o);
  const ShellBasis sb(3, ref.shell_length());
  const GalerkinSpace space(ref, sb, 3, 3);
  Eigen::VectorXd alpha(space.n_velocity());
  for (int k = 0; k < alpha.size(); ++k) alpha[k] = 0.3 * std::sin(1.7 * k + 0.4);
  auto coeff = [](double t) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(3);
    c[0] = 0.08 * std::sin(2.0 * kPi * t);
    c[1] = 0.04 * std::sin(4.0 * kPi * t);
    return c;
  };
  auto rate = [](double t) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(3);
    c[0] = 0.16 * kPi * std::cos(2.0 * kPi * t);
    c[1] = 0.16 * kPi * std::cos(4.0 * kPi * t);
    return c;
  };
  // shell slots follow the wall: zero when static, ∂tη when moving
  const Eigen::MatrixXd& E = space.shell_embedding();
  alpha -= E * (E.transpose() * alpha);
  FrameProvider frames = [&](double t) {
    const DomainChart ch(ref, moving ? modal_ray_displacement(sb, ref, coeff(t), rate(t)) : RayDisplacement::zero());
    return scalar_frame(make_frame(space, ch, t), moving ? Eigen::VectorXd(alpha + E * rate(t)) : alpha);
  };
  const TransportSolver ts(1e-2, -1e-8);
  ScalarFrame f = frames(0.0);
  Eigen::VectorXd nod(f.W.size());
  for (int q = 0; q < nod.size(); ++q) nod[q] = 1.0 + 0.5 * f.px[q] * f.py[q];
  Eigen::VectorXd beta = ts.project(nod, f);
  const double m0 = total_mass(beta, f);
  TransportRun out;
  out.min_rho = nonnegativity_check(beta, f);
  for (int k = 0; k < steps; ++k) {
    const TransportStep st = ts.step(beta, frames, k * dt, dt);
    beta = st.beta;
    f = frames((k + 1) * dt);
    out.drift = std::max(out.drift, std::abs(total_mass(beta, f) - m0) / m0);
    out.min_rho = std::min(out.min_rho, std::min(st.min_density, nonnegativity_check(beta, f)));
  }
  return out;
}

std::shared_ptr<TransportRun> cached_transport(bool moving) {
  static std::shared_ptr<TransportRun> s, m;
  auto& slot = moving ? m : s;
  if (!slot) slot = std::make_shared<TransportRun>(transport_disk_run(moving, 100, 1e-2));
  return slot;
}

CheckResult check_mass(const CheckOptions& opt) {
  const auto run = cached_run("moving", moving_scenario());
  const double s = cached_transport(false)->drift;
  const double m = cached_transport(true)->drift;
  double c = mass_drift(run->report.ledger);
  if (opt.fault == "mass") c += 1e-4;
  const double worst = std::max({s, m, c});
  CheckResult r{1, "mass", worst <= 1e-6 && run->report.ledger.size() >= 101, worst, 1e-6, ""};
  r.detail = "static " + fmt("%.2e", s) + " moving " + fmt("%.2e", m) + " coupled " + fmt("%.2e", c) +
             completed_or(*run);
  return r;
}

CheckResult check_nonnegativity(const CheckOptions& opt) {
  const double ts = cached_transport(false)->min_rho, tm = cached_transport(true)->min_rho;
  double m = std::min(ts, tm);
  std::string detail = "transport " + fmt("%.2e", ts) + " " + fmt("%.2e", tm);
  for (const char* key : {"moving", "restart", "forced", "vacuum"}) {
    const Scenario s = std::string(key) == "moving"    ? moving_scenario()
                       : std::string(key) == "restart" ? restart_scenario()
                       : std::string(key) == "forced"  ? forced_scenario()
                                                       : vacuum_scenario();
    const double k = min_density(cached_run(key, s)->report.ledger);
    detail += std::string(" ") + key + " " + fmt("%.2e", k);
    m = std::min(m, k);
  }
  if (opt.fault == "nonnegativity") m = -1e-6;
  return {2, "nonnegativity", m >= -1e-8, m, -1e-8, detail};
}

// Per-step energy defect for f = g = 0 under dt halving with a tight fixed-point tolerance.
std::vector<double> energy_defects() {
  std::vector<double> out;
  for (double dt : {0.02, 0.01, 0.005, 0.0025}) {
    Scenario s = check_base_scenario();
    s.eta1 = {0.2, 0.0, 0.0};
    s.dt = dt;
    s.T = 0.04;
    s.tol = 1e-12;
    s.max_iters = 200;
    CoupledSolver solver(to_problem(s));
    const RunReport r = solver.run();
    if (r.status != RunStatus::Completed) throw Error(ErrorKind::NoConvergence, "energy series: " + r.reason);
    out.push_back(energy_budget(r.ledger).max_step_violation);
  }
  return out;
}

CheckResult check_energy(const CheckOptions& opt) {
  const auto run = cached_run("moving", moving_scenario());
  double ratio = step_violation_ratio(run->report.ledger);
  std::vector<double> d = energy_defects();
  if (opt.fault == "energy") {
    ratio += 1e-3;
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = 1e-6 * (1.0 + 0.1 * i);
  }
  double order = 1e300;
  for (std::size_t i = 1; i < d.size(); ++i) order = std::min(order, std::log2(d[i - 1] / d[i]));
  CheckResult r{3, "energy", ratio <= 1e-4 && order >= 1.5, ratio, 1e-4, ""};
  r.detail = "min order " + fmt("%.2f", order) + " defects";
  for (double v : d) r.detail += " " + fmt("%.2e", v);
  r.detail += completed_or(*run);
  return r;
}

// Galerkin cosine modes against Crank–Nicolson on a 256² grid.
double square_transport_error(int modes, double eps, const Eigen::MatrixXd& fd, bool fault) {
  const double horizon = 0.2;
  const int steps = 40;
  const int n = static_cast<int>(fd.rows());
  auto rho0 = [](double x, double y) {
    return 1.0 + 0.5 * std::exp(-((x - 0.4) * (x - 0.4) + (y - 0.6) * (y - 0.6)) / 0.02);
  };
  const ScalarFrame f = square_cosine_frame(modes, 16, 6);
  const TransportSolver ts(eps, -1e-8);
  Eigen::VectorXd nod(f.W.size());
  for (int q = 0; q < nod.size(); ++q) nod[q] = rho0(f.px[q], f.py[q]);
  Eigen::VectorXd b = ts.advance_static(ts.project(nod, f), assemble_transport_system(f), horizon / steps, steps);
  if (fault) b *= 1.1;
  Eigen::MatrixXd coef = Eigen::MatrixXd::Zero(modes, modes);
  int k = 0;
  for (int d = 0; d < modes; ++d)
    for (int i = d; i >= 0; --i) coef(i, d - i) = b[k++];
  Eigen::MatrixXd C(n, modes);
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < modes; ++i) C(a, i) = std::cos(i * kPi * (a + 0.5) / n);
  const Eigen::MatrixXd g = C * coef * C.transpose();
  return (g - fd).norm() / fd.norm();
}

Eigen::MatrixXd square_reference(double eps) {
  auto rho0 = [](double x, double y) {
    return 1.0 + 0.5 * std::exp(-((x - 0.4) * (x - 0.4) + (y - 0.6) * (y - 0.6)) / 0.02);
  };
  return oracle::square_heat_cn(256, eps, rho0, 0.2, 40);
}

CheckResult check_transport_oracle(const CheckOptions& opt) {
  const Eigen::MatrixXd fd = square_reference(1e-2);
  const bool fault = opt.fault == "transport-oracle";
  std::vector<double> e;
  for (int modes : {8, 16, 32}) e.push_back(square_transport_error(modes, 1e-2, fd, fault));
  const bool conv = e[0] > e[1] && e[1] > e[2];
  CheckResult r{4, "transport-oracle", e[2] <= 0.05 && conv, e[2], 0.05, ""};
  r.detail = "L2 rel at 8/16/32 modes " + fmt("%.2e", e[0]) + " " + fmt("%.2e", e[1]) + " " + fmt("%.2e", e[2]);
  return r;
}

std::vector<double> shell_spectrum_errors(bool fault) {
  const ReferenceDomain ref(DomainOptions{});
  const ShellBasis sb(5, ref.shell_length());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(sb.curvature_gram(), sb.mass_gram());
  const std::vector<double> fd = oracle::clamped_beam_eigenvalues(256, ref.shell_length(), 3);
  std::vector<double> out;
  for (int k = 0; k < 3; ++k) {
    const double ev = es.eigenvalues()[k] * (fault ? 1.02 : 1.0);
    out.push_back(std::abs(ev - fd[k]) / fd[k]);
  }
  return out;
}

CheckResult check_shell_spectrum(const CheckOptions& opt) {
  const std::vector<double> e = shell_spectrum_errors(opt.fault == "shell-spectrum");
  const double worst = *std::max_element(e.begin(), e.end());
  CheckResult r{5, "shell-spectrum", worst <= 0.01, worst, 0.01, "rel"};
  for (double v : e) r.detail += " " + fmt("%.2e", v);
  return r;
}

CheckResult check_trace(const CheckOptions& opt) {
  double m = 0.0;
  m = std::max(m, max_trace(cached_run("moving", moving_scenario())->report.ledger));
  m = std::max(m, max_trace(cached_run("restart", restart_scenario())->report.ledger));
  m = std::max(m, max_trace(cached_run("forced", forced_scenario())->report.ledger));
  if (opt.fault == "trace") m += 1e-6;
  return {6, "trace", m <= 1e-8, m, 1e-8, "max over accepted steps"};
}

std::vector<double> reynolds_series(bool fault) {
  DomainOptions o;
  o.shell_covers_boundary = true;
  o.angular_cells = 8;
  o.layer_cells = 6;
  const ReferenceDomain ref(o);
  DisplacementTrajectory eta = [](double t) {
    return RayDisplacement::constant(0.1 * std::sin(t), 0.1 * std::cos(t));
  };
  SpaceTimeField g = [](double t, const Vec2& y) {
    return std::exp(0.5 * t) * (1.0 + y.x() * y.x() + 0.3 * y.y());
  };
  std::vector<double> out;
  for (double h : {0.02, 0.01, 0.005, 0.0025}) {
    double r = reynolds_residual(g, eta, ref, 0.5, h).residual;
    if (fault) r += 1e-4;
    out.push_back(r);
  }
  return out;
}

CheckResult check_reynolds(const CheckOptions& opt) {
  const std::vector<double> r = reynolds_series(opt.fault == "reynolds");
  double order = 1e300;
  for (std::size_t i = 1; i < r.size(); ++i) order = std::min(order, std::log2(r[i - 1] / r[i]));
  CheckResult c{7, "reynolds", r.back() <= 1e-5 && order >= 1.9, r.back(), 1e-5, "min order " + fmt("%.2f", order)};
  return c;
}

struct MollifierReport {
  double max_excess = 0.0;  // max|𝓡ζ| − max|ζ|, worst case
  std::vector<double> errors;
  double commutation = 0.0;
};

MollifierReport mollifier_suite(bool fault) {
  MollifierReport out;
  const double T = 1.0, ell = 2.0;
  const int nt = 2001, ns = 64;
  BoundaryTrajectory z(nt, ns), zt(nt, ns);
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < ns; ++j) {
      const double t = i * T / (nt - 1), a = j * ell / ns;
      z(i, j) = 0.2 + std::sin(kPi * a) * std::cos(3.0 * t);
      zt(i, j) = -3.0 * std::sin(kPi * a) * std::sin(3.0 * t);
    }
  MollifierConfig cfg;
  cfg.horizon = T;
  cfg.arc_length = ell;
  const double scale = fault ? 1.01 : 1.0;

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  BoundaryTrajectory noise(201, 32);
  for (int i = 0; i < noise.rows(); ++i)
    for (int j = 0; j < noise.cols(); ++j) noise(i, j) = u(rng);
  cfg.kappa = 0.05;
  for (const BoundaryTrajectory* f : {&z, &noise}) {
    const BoundaryTrajectory R = scale * mollify_displacement(*f, cfg);
    out.max_excess = std::max(out.max_excess, R.cwiseAbs().maxCoeff() - f->cwiseAbs().maxCoeff());
  }
  SpaceTimeGrid g, chi;
  g.nt = chi.nt = 21;
  g.nx = chi.nx = 21;
  g.ny = chi.ny = 21;
  g.dt = chi.dt = g.dx = chi.dx = g.dy = chi.dy = 0.05;
  g.values.resize(21 * 21 * 21);
  chi.values.assign(21 * 21 * 21, 1.0);
  for (double& v : g.values) v = u(rng);
  const SpaceTimeGrid Rg = mollify_field(g, chi, 0.12);
  double vmax = 0.0, rmax = 0.0;
  for (double v : g.values) vmax = std::max(vmax, std::abs(v));
  for (double v : Rg.values) rmax = std::max(rmax, scale * std::abs(v));
  out.max_excess = std::max(out.max_excess, rmax - vmax);

  for (double k : {0.1, 0.05, 0.025, 0.0125, 0.00625}) {
    cfg.kappa = k;
    out.errors.push_back((scale * mollify_displacement(z, cfg) - z).cwiseAbs().maxCoeff());
  }
  if (fault) out.errors[2] = out.errors[1] * 2.0;

  cfg.kappa = 0.05;
  const Mollifier m(cfg);
  const BoundaryTrajectory r1 = mollify_displacement_rate(z, cfg);
  const BoundaryTrajectory r2 = mollify_displacement(zt, cfg);
  for (int i = 0; i < nt; ++i) {
    const double t = i * T / (nt - 1);
    if (t < cfg.kappa || t > T - cfg.kappa || m.psi_derivative(t) != 0.0) continue;
    out.commutation = std::max(out.commutation, (r1.row(i) - scale * r2.row(i)).cwiseAbs().maxCoeff());
  }
  return out;
}

CheckResult check_mollifier(const CheckOptions& opt) {
  const MollifierReport m = mollifier_suite(opt.fault == "mollifier");
  bool mono = true;
  for (std::size_t i = 1; i < m.errors.size(); ++i) mono = mono && m.errors[i] < m.errors[i - 1];
  const bool pass = m.max_excess <= 1e-14 && mono && m.commutation <= 1e-6;
  CheckResult r{8, "mollifier", pass, m.commutation, 1e-6, ""};
  r.detail = "max excess " + fmt("%.1e", m.max_excess) + (mono ? " errors monotone" : " errors not monotone");
  for (double e : m.errors) r.detail += " " + fmt("%.2e", e);
  return r;
}

std::string diagnostics_text(const RunReport& r) {
  std::ostringstream os;
  write_diagnostics(os, r.ledger);
  write_convergence(os, r.convergence);
  return os.str();
}

CheckResult check_fixed_point(const CheckOptions& opt) {
  Scenario s = forced_scenario();
  if (opt.fault == "fixed-point") s.max_iters = 3;
  const auto run = cached_run(opt.fault == "fixed-point" ? "forced-fault" : "forced", s);
  const auto& conv = run->report.convergence;
  int worst_iters = 0;
  double worst_res = 0.0, worst_ratio = 0.0;
  for (int w = 0; w < run->report.windows; ++w) {
    std::vector<ConvergenceRow> rows;
    for (const auto& c : conv)
      if (c.window == w) rows.push_back(c);
    if (rows.empty()) continue;
    worst_iters = std::max(worst_iters, rows.back().iter);
    worst_res = std::max(worst_res, rows.back().u_diff + rows.back().eta_diff);
    const std::size_t n = std::min<std::size_t>(10, rows.size() - 1);
    double lr = 0.0;
    for (std::size_t i = rows.size() - n; i < rows.size(); ++i) lr += std::log(rows[i].ratio);
    if (n > 0) worst_ratio = std::max(worst_ratio, std::exp(lr / n));
  }
  // identical rerun on a fresh solver
  CoupledSolver again(to_problem(s));
  const RunReport r2 = again.run();
  const bool same = diagnostics_text(run->report) == diagnostics_text(r2);
  const bool done = run->report.status == RunStatus::Completed;
  const bool pass = done && worst_iters <= 50 && worst_res <= 1e-6 && worst_ratio < 1.0 && same;
  CheckResult r{9, "fixed-point", pass, worst_res, 1e-6, ""};
  r.detail = "iters " + std::to_string(worst_iters) + " contraction " + fmt("%.3f", worst_ratio) +
             (same ? " rerun identical" : " rerun differs") + completed_or(*run);
  return r;
}

CheckResult check_boundary_probe(const CheckOptions& opt) {
  const auto run = cached_run("moving", moving_scenario());
  std::vector<double> mass;
  double xi = 0.0;
  for (double K : {10.0, 20.0, 40.0, 80.0}) {
    const ConcentrationProbe p = boundary_concentration_probe(*run->solver, run->report.levels, K);
    mass.push_back(p.boundary_mass * (opt.fault == "boundary-probe" ? K : 1.0));
    xi = std::max(xi, p.xi3_trace);
  }
  bool mono = true;
  for (std::size_t i = 1; i < mass.size(); ++i) mono = mono && mass[i] <= mass[i - 1];
  CheckResult r{10, "boundary-probe", mono && xi <= 1e-8, xi, 1e-8, mono ? "mass nonincreasing" : "mass increases"};
  for (double v : mass) r.detail += " " + fmt("%.3e", v);
  return r;
}

CheckResult check_sweeps(const CheckOptions& opt) {
  const bool fault = opt.fault == "sweeps";
  std::string fails;
  // params independent of the layers
  const std::vector<double> shell = shell_spectrum_errors(false);
  const std::vector<double> rey = reynolds_series(false);
  if (*std::max_element(shell.begin(), shell.end()) > 0.01) fails += " shell";
  if (rey.back() > 1e-5) fails += " reynolds";

  auto invariants = [&](const std::string& tag, const Run& run) {
    const auto& L = run.report.ledger;
    if (run.report.status != RunStatus::Completed) fails += " " + tag + ":status";
    if (mass_drift(L) > 1e-6) fails += " " + tag + ":mass";
    if (min_density(L) < -1e-8) fails += " " + tag + ":rho";
    if (step_violation_ratio(L) > 1e-4) fails += " " + tag + ":energy";
    if (max_trace(L) > 1e-8) fails += " " + tag + ":trace";
  };

  std::vector<double> deltas = {4e-3, 2e-3, 1e-3}, slope;
  for (double d : deltas) {
    Scenario s = check_base_scenario();
    s.T = 0.2;
    s.delta = d;
    const auto run = cached_run("delta=" + format_double(d), s);
    invariants("delta=" + format_double(d), *run);
    slope.push_back(run->report.ledger.back().internal_beta / d);
  }
  if (fault) slope[1] *= 1.5;
  double lin = 0.0;
  for (double v : slope) lin = std::max(lin, std::abs(v / slope.front() - 1.0));

  std::vector<double> hi;
  for (double e : {1e-2, 1e-3, 1e-4}) {
    Scenario s = check_base_scenario();
    s.T = 0.2;
    s.epsilon = e;
    const auto run = cached_run("epsilon=" + format_double(e), s);
    invariants("epsilon=" + format_double(e), *run);
    hi.push_back(higher_integrability(*run->solver, run->report.levels));
    const Eigen::MatrixXd fd = square_reference(e);
    if (square_transport_error(16, e, fd, false) > 0.05) fails += " oracle@" + format_double(e);
  }
  const double ratio = *std::max_element(hi.begin(), hi.end()) / *std::min_element(hi.begin(), hi.end());

  const bool pass = lin <= 0.05 && ratio <= 2.0 && fails.empty();
  CheckResult r{11, "sweeps", pass, ratio, 2.0, ""};
  r.detail = "beta/delta spread " + fmt("%.2e", lin) + " rho^(g+1) ratio " + fmt("%.3f", ratio) +
             (fails.empty() ? std::string(" invariants ok") : " failed:" + fails);
  return r;
}

CheckResult check_restart(const CheckOptions& opt) {
  const auto run = cached_run("restart", restart_scenario());
  double dm = 0.0, de = 0.0;
  for (const auto& rr : run->report.restarts) {
    dm = std::max(dm, rr.mass_change());
    de = std::max(de, rr.energy_change());
  }
  if (opt.fault == "restart") dm += 1e-5;
  const bool any = !run->report.restarts.empty();
  CheckResult r{12, "restart", any && dm <= 1e-6 && de <= 1e-6, std::max(dm, de), 1e-6, ""};
  r.detail = std::to_string(run->report.restarts.size()) + " restarts mass " + fmt("%.2e", dm) + " energy " +
             fmt("%.2e", de) + completed_or(*run);
  return r;
}

CheckResult check_config_roundtrip(const CheckOptions& opt) {
  std::vector<Scenario> cases = {Scenario{}, check_base_scenario(), forced_scenario()};
  cases.back().forcing_cutoff = 0.1;
  cases.back().seed = 42;
  cases.back().u0 = "lift+swirl";
  cases.back().u0_amplitude = 1.0 / 3.0;
  int bad = 0;
  for (const Scenario& s : cases) {
    Scenario back = parse_scenario(emit_scenario(s), false);
    if (opt.fault == "config-roundtrip") back.dt *= 1.0 + 1e-15 * 8;
    if (!(back == s)) ++bad;
  }
  return {0, "config-roundtrip", bad == 0, static_cast<double>(bad), 0.0, "parse(emit(s)) == s"};
}

CheckResult check_chart(const CheckOptions& opt) {
  DomainOptions o;
  o.angular_cells = 8;
  const ReferenceDomain ref(o);
  const ShellBasis sb(3, ref.shell_length());
  Eigen::VectorXd c(3);
  c << 0.1, -0.05, 0.03;
  const DomainChart ch = build_chart(ref, modal_ray_displacement(sb, ref, c));
  double jerr = 0.0, inv = 0.0, cp = 0.0;
  const std::function<Vec2(const Vec2&)> map = [&](const Vec2& x) -> Vec2 { return ch.psi(x); };
  for (double r : {0.2, 0.6, 0.8, 0.95})
    for (double th : {0.3, 1.2, 2.0, 4.0}) {
      const Vec2 x = r * Vec2(std::cos(th), std::sin(th));
      jerr = std::max(jerr, (ch.jacobian(x) - oracle::jacobian(map, x, 1e-4)).cwiseAbs().maxCoeff());
      inv = std::max(inv, (ch.psi_inverse(ch.psi(x)) - x).norm());
      if (r > 0.6) {
        const TubeCoordinates tc = closest_point_decomposition(x, ref);
        cp = std::max(cp, (tc.q + tc.s * ref.normal(tc.theta) - x).norm());
      }
    }
  if (opt.fault == "chart") jerr += 1e-3;
  const double worst = std::max({jerr, inv, cp});
  CheckResult r{0, "chart", worst <= 1e-6, worst, 1e-6, ""};
  r.detail = "jacobian vs FD " + fmt("%.1e", jerr) + " inverse " + fmt("%.1e", inv) + " closest point " + fmt("%.1e", cp);
  return r;
}

double static_shell_error(const Scenario& s, const ShellLoad& g, int modes, bool fault) {
  const ReferenceDomain ref(to_problem(s).domain);
  const ShellBasis sb(modes, ref.shell_length());
  const ShellParams p{s.shell_m, s.shell_b2, s.shell_b0};
  const Eigen::VectorXd c = sb.stiffness(p).ldlt().solve(shell_load_vector(sb, g, 0.0)) * (fault ? 1.1 : 1.0);
  const oracle::BeamProfile fd =
      oracle::static_beam(256, sb.length(), p.m, p.b2, p.b0, [&](double a) { return g(0.0, a); });
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < fd.a.size(); ++i) {
    const double d = sb.evaluate(c, fd.a[i]) - fd.w[i];
    num += d * d;
    den += fd.w[i] * fd.w[i];
  }
  return std::sqrt(num / den);
}

CheckResult check_shell_static(const CheckOptions& opt) {
  Scenario s;
  s.shell_b2 = 0.5;
  s.shell_b0 = 2.0;
  const double L = ReferenceDomain(to_problem(s).domain).shell_length();
  const ShellLoad g = [L](double, double a) { return std::sin(kPi * a / L) + 0.3 * a / L; };
  const double e = static_shell_error(s, g, 8, opt.fault == "shell-static");
  return {0, "shell-static", e <= 0.01, e, 0.01, "8 modes vs clamped FD beam, L2 rel"};
}

CheckResult check_guard(const CheckOptions& opt) {
  Scenario s = check_base_scenario();
  s.shell_m = 1e-3;
  s.eta0 = {0.2, 0.0, 0.0};
  s.eta1 = {0.3, 0.0, 0.0};
  s.T = 0.5;
  CoupledSolver solver(to_problem(s));
  const RunReport r = solver.run();
  const bool stopped = r.status == RunStatus::Guard && !r.reason.empty() && opt.fault != "guard";
  const bool direct = self_intersection_guard(0.3, 1.0, 0.5, 0.45, 1e-4) == GuardReason::Displacement &&
                      self_intersection_guard(0.1, 1e-6, 0.5, 0.45, 1e-4) == GuardReason::Jacobian &&
                      self_intersection_guard(0.1, 0.9, 0.5, 0.45, 1e-4) == GuardReason::None;
  CheckResult c{0, "guard", stopped && direct, r.ledger.empty() ? 0.0 : r.ledger.back().t, s.T, ""};
  c.detail = "status " + status_name(r.status) + (r.reason.empty() ? "" : " (" + r.reason + ")");
  return c;
}

}  // namespace

Scenario check_base_scenario() {
  Scenario s;
  s.angular_cells = 8;
  s.density_degree = 3;
  s.velocity_degree = 3;
  s.shell_modes = 3;
  s.shell_m = 1.0;
  s.dt = 1e-2;
  s.T = 0.2;
  s.kappa = 1e-3;
  s.epsilon = 1e-2;
  s.rho0 = "linear";
  s.rho0_value = 1.0;
  s.rho0_amplitude = 0.1;
  s.eta0 = {0.0, 0.0, 0.0};
  s.eta1 = {0.05, 0.0, 0.0};
  s.u0 = "lift";
  return s;
}

const std::vector<std::string>& check_suites() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& s : kSuites) v.emplace_back(s.name);
    return v;
  }();
  return names;
}

const std::vector<std::string>& acceptance_suites() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& s : kSuites)
      if (s.criterion > 0) v.emplace_back(s.name);
    return v;
  }();
  return names;
}

bool is_check_suite(const std::string& name) { return criterion_of(name) >= 0; }

CheckResult run_check(const std::string& suite, const CheckOptions& opt) {
  using Fn = CheckResult (*)(const CheckOptions&);
  static const std::map<std::string, Fn> table = {
      {"mass", check_mass},
      {"nonnegativity", check_nonnegativity},
      {"energy", check_energy},
      {"transport-oracle", check_transport_oracle},
      {"shell-spectrum", check_shell_spectrum},
      {"trace", check_trace},
      {"reynolds", check_reynolds},
      {"mollifier", check_mollifier},
      {"fixed-point", check_fixed_point},
      {"boundary-probe", check_boundary_probe},
      {"sweeps", check_sweeps},
      {"restart", check_restart},
      {"config-roundtrip", check_config_roundtrip},
      {"chart", check_chart},
      {"shell-static", check_shell_static},
      {"guard", check_guard},
  };
  const auto it = table.find(suite);
  if (it == table.end()) throw Error(ErrorKind::ValidationError, "unknown suite: " + suite);
  try {
    return it->second(opt);
  } catch (const Error& e) {
    return {criterion_of(suite), suite, false, 0.0, 0.0, std::string("error: ") + e.what()};
  }
}

std::vector<CheckResult> run_checks(const std::vector<std::string>& suites, const CheckOptions& opt) {
  std::vector<CheckResult> out;
  for (const auto& s : suites) out.push_back(run_check(s, opt));
  return out;
}

std::string format_check(const CheckResult& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "[%s] %2d %-17s value=%-11.4g limit=%-9.3g ", r.pass ? "PASS" : "FAIL",
                r.criterion, r.suite.c_str(), r.value, r.limit);
  return buf + r.detail;
}

std::vector<OracleRow> run_oracles(const Scenario& s) {
  std::vector<OracleRow> rows;
  const ReferenceDomain ref(to_problem(s).domain);
  const ShellBasis sb(std::max(8, s.shell_modes), ref.shell_length());
  const ShellParams p{s.shell_m, s.shell_b2, s.shell_b0};
  const Eigen::MatrixXd K = sb.stiffness(p);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> e4(sb.curvature_gram(), sb.mass_gram());
  const std::vector<double> fd = oracle::clamped_beam_eigenvalues(256, sb.length(), 3);
  for (int k = 0; k < 3; ++k) {
    const double g = e4.eigenvalues()[k];
    const double e = std::abs(g - fd[k]) / fd[k];
    rows.push_back({"beam_eigenvalue_" + std::to_string(k + 1), g, fd[k], e, 0.01, e <= 0.01});
  }

  ShellLoad load = to_problem(s).g;
  if (!load) load = [](double, double) { return 1.0; };
  {
    const Eigen::VectorXd c = K.ldlt().solve(shell_load_vector(sb, load, 0.0));
    const oracle::BeamProfile beam =
        oracle::static_beam(256, sb.length(), p.m, p.b2, p.b0, [&](double a) { return load(0.0, a); });
    double num = 0.0, den = 0.0, peak_g = 0.0, peak_f = 0.0;
    for (std::size_t i = 0; i < beam.a.size(); ++i) {
      const double w = sb.evaluate(c, beam.a[i]);
      num += (w - beam.w[i]) * (w - beam.w[i]);
      den += beam.w[i] * beam.w[i];
      if (std::abs(beam.w[i]) > std::abs(peak_f)) {
        peak_f = beam.w[i];
        peak_g = w;
      }
    }
    const double e = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
    rows.push_back({"static_shell_l2", peak_g, peak_f, e, 0.02, e <= 0.02});
  }

  const Eigen::MatrixXd heat = square_reference(s.epsilon);
  const double e = square_transport_error(16, s.epsilon, heat, false);
  rows.push_back({"square_heat_l2_16_modes", e, 0.0, e, 0.05, e <= 0.05});
  return rows;
}

}  // namespace kfsi
