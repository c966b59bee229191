#include "koiter_fsi/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "koiter_fsi/error.hpp"
#include "koiter_fsi/quadrature.hpp"

namespace kfsi {

EnergyReport energy_budget(const std::vector<LedgerRow>& ledger, double tol) {
  EnergyReport r;
  if (ledger.empty()) return r;
  r.energy0 = ledger.front().total_energy();
  for (std::size_t i = 0; i < ledger.size(); ++i) {
    const LedgerRow& l = ledger[i];
    r.max_violation = std::max(r.max_violation, l.inequality_residual - tol);
    if (i > 0) {
      const LedgerRow& p = ledger[i - 1];
      const double d = (l.total_energy() - p.total_energy()) + (l.dissipation_cum - p.dissipation_cum) -
                       (l.forcing_work_cum - p.forcing_work_cum);
      r.max_step_violation = std::max(r.max_step_violation, std::abs(d));
    }
  }
  r.max_violation = std::max(r.max_violation, 0.0);
  return r;
}

// q(x) = 2x − 2x³ + x⁴ on x = (z − 1)/2, so T = 1 + q.
double knee(double z) {
  if (z <= 1.0) return z;
  if (z >= 3.0) return 2.0;
  const double x = 0.5 * (z - 1.0);
  return 1.0 + x * (2.0 + x * x * (-2.0 + x));
}

double knee_derivative(double z) {
  if (z <= 1.0) return 1.0;
  if (z >= 3.0) return 0.0;
  const double x = 0.5 * (z - 1.0);
  return 0.5 * (2.0 - 6.0 * x * x + 4.0 * x * x * x);
}

double truncation(double z, double k) { return k * knee(z / k); }

double log_truncation(double z, double k) {
  if (z < 0.0) throw Error(ErrorKind::NegativeDensity, "log truncation of a negative density");
  if (z < k) return entropy_density(z);
  static const Rule1D g = gauss_legendre(16);
  double integral = 0.0;
  const double b = std::min(z, 3.0 * k);
  for (std::size_t q = 0; q < g.size(); ++q) {
    const double s = 0.5 * (k + b) + 0.5 * (b - k) * g.x[q];
    integral += 0.5 * (b - k) * g.w[q] * truncation(s, k) / (s * s);
  }
  if (z > 3.0 * k) integral += 2.0 * k * (1.0 / (3.0 * k) - 1.0 / z);
  return z * std::log(k) + z * integral;
}

double entropy_density(double z) {
  if (z < 0.0) throw Error(ErrorKind::NegativeDensity, "entropy of a negative density");
  return z > 0.0 ? z * std::log(z) : 0.0;
}

namespace {

double clamp_density(double r) {
  if (r >= 0.0) return r;
  if (r >= -1e-8) return 0.0;
  throw Error(ErrorKind::NegativeDensity, "density " + std::to_string(r) + " below zero");
}

// trapezoid weights for the level times
std::vector<double> time_weights(const std::vector<LevelState>& levels) {
  std::vector<double> w(levels.size(), 0.0);
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
    const double h = levels[i + 1].t - levels[i].t;
    w[i] += 0.5 * h;
    w[i + 1] += 0.5 * h;
  }
  return w;
}

}  // namespace

TruncationValues truncation_functionals(const CoupledSolver& solver, const LevelState& s, double k) {
  if (!(k >= 1.0)) throw Error(ErrorKind::ValidationError, "truncation level k at least 1");
  const Frame f = solver.frame(s);
  const Eigen::VectorXd rho = f.rho.val * s.beta;
  TruncationValues v;
  for (Eigen::Index q = 0; q < rho.size(); ++q) {
    const double r = clamp_density(rho[q]);
    const double w = f.geo.W[q];
    v.T += w * truncation(r, k);
    v.L += w * log_truncation(r, k);
    v.entropy += w * entropy_density(r);
  }
  return v;
}

double InteriorBump::operator()(const Vec2& x) const {
  const double w = 0.5 * h;
  return smoothstep5((h - std::abs(x.x())) / w) * smoothstep5((h - std::abs(x.y())) / w);
}

InteriorBump interior_bump(const CoupledSolver& solver) {
  const auto& ref = solver.reference();
  // the square stays inside the disk of radius R − L, where no chart moves points
  InteriorBump b;
  b.h = (ref.radius() - ref.tube_width()) / std::numbers::sqrt2;
  return b;
}

FluxSample effective_viscous_flux(const CoupledSolver& solver, const LevelState& s,
                                  const InteriorBump& psi) {
  const FluidParams& fp = solver.data().fluid;
  const Frame f = solver.frame(s);
  const Eigen::VectorXd rho = f.rho.val * s.beta;
  const Eigen::VectorXd div = divergence_at_nodes(f, s.alpha);
  FluxSample out;
  out.x = f.geo.y;
  out.F.resize(rho.size());
  for (Eigen::Index q = 0; q < rho.size(); ++q) {
    out.F[q] = fp.pressure(rho[q]) - (fp.lambda + 2.0 * fp.mu) * div[q];
    const double p = psi(f.geo.y[q]);
    out.pairing += f.geo.W[q] * p * p * out.F[q] * rho[q];
  }
  return out;
}

double flux_pairing(const CoupledSolver& solver, const std::vector<LevelState>& levels) {
  const InteriorBump psi = interior_bump(solver);
  const std::vector<double> w = time_weights(levels);
  double s = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i)
    if (w[i] > 0.0) s += w[i] * effective_viscous_flux(solver, levels[i], psi).pairing;
  return s;
}

double higher_integrability(const CoupledSolver& solver, const std::vector<LevelState>& levels) {
  const InteriorBump psi = interior_bump(solver);
  const double g1 = solver.data().fluid.gamma + 1.0;
  const std::vector<double> w = time_weights(levels);
  double s = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (w[i] == 0.0) continue;
    const Frame f = solver.frame(levels[i]);
    const Eigen::VectorXd rho = f.rho.val * levels[i].beta;
    double v = 0.0;
    for (Eigen::Index q = 0; q < rho.size(); ++q)
      if (psi.in_cube(f.geo.y[q])) v += f.geo.W[q] * std::pow(std::abs(rho[q]), g1);
    s += w[i] * v;
  }
  return s;
}

double entropy_residual(const CoupledSolver& solver, const std::vector<LevelState>& levels) {
  if (levels.empty()) return 0.0;
  const std::vector<double> w = time_weights(levels);
  double e0 = 0.0, e1 = 0.0, work = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const bool ends = i == 0 || i + 1 == levels.size();
    if (!ends && w[i] == 0.0) continue;
    const Frame f = solver.frame(levels[i]);
    const Eigen::VectorXd rho = f.rho.val * levels[i].beta;
    const Eigen::VectorXd div = divergence_at_nodes(f, levels[i].alpha);
    double ent = 0.0, rd = 0.0;
    for (Eigen::Index q = 0; q < rho.size(); ++q) {
      const double r = clamp_density(rho[q]);
      ent += f.geo.W[q] * entropy_density(r);
      rd += f.geo.W[q] * r * div[q];
    }
    if (i == 0) e0 = ent;
    if (i + 1 == levels.size()) e1 = ent;
    work += w[i] * rd;
  }
  return std::abs(e1 - e0 + work);
}

ConcentrationProbe boundary_concentration_probe(const CoupledSolver& solver,
                                                const std::vector<LevelState>& levels, double K,
                                                int max_levels) {
  ConcentrationProbe out;
  out.K = K;
  if (levels.empty()) return out;
  const auto& ref = solver.reference();
  const auto& sb = solver.shell();
  const auto& space = solver.space();
  const FluidParams& fp = solver.data().fluid;
  const double R = ref.radius();
  const double L = ref.tube_width();
  const double pi = std::numbers::pi;

  std::vector<std::size_t> pick;
  const std::size_t n = levels.size();
  const std::size_t m = std::min<std::size_t>(n, std::max(2, max_levels));
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t i = m == 1 ? 0 : (j * (n - 1)) / (m - 1);
    if (pick.empty() || pick.back() != i) pick.push_back(i);
  }
  std::vector<double> tw(pick.size(), 0.0);
  for (std::size_t j = 0; j + 1 < pick.size(); ++j) {
    const double h = levels[pick[j + 1]].t - levels[pick[j]].t;
    tw[j] += 0.5 * h;
    tw[j + 1] += 0.5 * h;
  }
  if (pick.size() == 1) tw[0] = 1.0;

  const Rule1D g = gauss_legendre(6);
  const int n_ang = 96;
  const auto& db = space.density();
  const auto& vb = space.velocity();
  const auto& E = space.shell_embedding();
  Eigen::VectorXd dv(db.size()), dgx(db.size()), dgy(db.size());

  auto cut = [&](double s) {
    return s >= -0.5 * L ? 1.0 : smoothstep5((L + s) / (0.5 * L));
  };
  auto cut_r = [&](double s) {
    return s >= -0.5 * L ? 0.0 : smoothstep5_derivative((L + s) / (0.5 * L)) * 2.0 / L;
  };

  for (std::size_t j = 0; j < pick.size(); ++j) {
    const LevelState& l = levels[pick[j]];
    const DomainChart ch = solver.chart(l.geom, {}, l.layers);
    const Eigen::VectorXd eta_dot = E.transpose() * l.alpha;
    auto eta_of = [&](double th) { return ch.total_displacement(th); };
    auto rho_at = [&](const Vec2& x) {
      db.eval(ch.psi_inverse(x), dv, dgx, dgy);
      return dv.dot(l.beta);
    };
    auto u_at = [&](const Vec2& x) {
      const Vec2 X = ch.psi_inverse(x);
      Vec2 u = Vec2::Zero();
      for (int k = 0; k < vb.size(); ++k) {
        Vec2 val;
        Mat2 grad;
        vb.eval(k, X, val, grad);
        u += l.alpha[k] * val;
      }
      return u;
    };
    double mass = 0.0, pdiv = 0.0, pair = 0.0, xi = 0.0;
    for (int a = 0; a < n_ang; ++a) {
      const double th = 2.0 * pi * (a + 0.5) / n_ang;
      const double wth = 2.0 * pi / n_ang;
      const double eta = eta_of(th);
      const double etad = ref.on_shell(th) ? sb.evaluate(eta_dot, ref.shell_coordinate(th)) : 0.0;
      const Vec2 er(std::cos(th), std::sin(th));
      const double top = R + eta;
      const double knee_r = top - 1.0 / K;
      std::vector<double> br = {R - L, R - 0.5 * L, std::max(knee_r, R - L), top};
      std::sort(br.begin(), br.end());
      for (std::size_t c = 0; c + 1 < br.size(); ++c) {
        const double r0 = br[c], r1 = br[c + 1];
        if (r1 - r0 <= 0.0) continue;
        for (std::size_t q = 0; q < g.size(); ++q) {
          const double r = 0.5 * (r0 + r1) + 0.5 * (r1 - r0) * g.x[q];
          const double w = wth * 0.5 * (r1 - r0) * g.w[q] * r;
          const Vec2 x = r * er;
          const double s = r - R;
          const double ks = K * (s - eta);
          const bool active = ks > -1.0;
          const double mm = std::max(ks, -1.0);
          const double phi = cut(s);
          const double div = cut_r(s) * mm + phi * (active ? K : 0.0) + phi * mm / r;
          const double p = fp.pressure(rho_at(x));
          pdiv += tw[j] * w * p * div;
          if (active) {
            mass += tw[j] * w * p;
            const Vec2 u = u_at(x);
            pair += tw[j] * w * rho_at(x) * (phi * K * (-etad)) * u.dot(er);
            // ξ³_jj = −Kφ Σ_j ∂_j(η∘q) ν_j with a fourth-order stencil
            const TubeCoordinates tc = closest_point_decomposition(x, ref);
            const Vec2 nu = tc.q / R;
            const double h = 1e-3;
            double tr = 0.0;
            for (int d = 0; d < 2; ++d) {
              Vec2 e = Vec2::Zero();
              e[d] = h;
              auto et = [&](const Vec2& y) { return eta_of(closest_point_decomposition(y, ref).theta); };
              const double der = (-et(x + 2.0 * e) + 8.0 * et(x + e) - 8.0 * et(x - e) + et(x - 2.0 * e)) / (12.0 * h);
              tr += der * nu[d];
            }
            xi = std::max(xi, std::abs(K * phi * tr));
          }
        }
      }
    }
    out.boundary_mass += mass;
    out.p_div_phi += pdiv;
    out.time_pairing += pair;
    out.xi3_trace = std::max(out.xi3_trace, xi);
  }
  return out;
}

std::vector<ProbeRow> standard_probes(const CoupledSolver& solver, const RunReport& run) {
  std::vector<ProbeRow> rows;
  const EnergyReport e = energy_budget(run.ledger);
  rows.push_back({"energy_max_violation", 0.0, e.max_violation});
  rows.push_back({"energy_max_step_violation", 0.0, e.max_step_violation});
  double m0 = run.ledger.empty() ? 0.0 : run.ledger.front().mass, drift = 0.0, tr = 0.0, mn = 1e300;
  for (const auto& l : run.ledger) {
    drift = std::max(drift, std::abs(l.mass - m0) / std::max(std::abs(m0), 1e-300));
    tr = std::max(tr, l.trace_residual);
    mn = std::min(mn, l.min_density);
  }
  rows.push_back({"mass_drift", 0.0, drift});
  rows.push_back({"min_density", 0.0, mn});
  rows.push_back({"trace_residual_max", 0.0, tr});
  for (double K : {10.0, 20.0, 40.0, 80.0}) {
    const ConcentrationProbe p = boundary_concentration_probe(solver, run.levels, K);
    rows.push_back({"boundary_pressure_mass", K, p.boundary_mass});
    rows.push_back({"pressure_div_phi", K, p.p_div_phi});
    rows.push_back({"momentum_time_pairing", K, p.time_pairing});
    rows.push_back({"xi3_trace", K, p.xi3_trace});
  }
  rows.push_back({"flux_pairing", 0.0, flux_pairing(solver, run.levels)});
  rows.push_back({"higher_integrability", solver.data().fluid.gamma + 1.0,
                  higher_integrability(solver, run.levels)});
  rows.push_back({"entropy_residual", 0.0, entropy_residual(solver, run.levels)});
  if (!run.levels.empty()) {
    for (double k : {1.0, 2.0}) {
      const TruncationValues tv = truncation_functionals(solver, run.levels.back(), k);
      rows.push_back({"truncation_T", k, tv.T});
      rows.push_back({"truncation_L", k, tv.L});
    }
    rows.push_back({"entropy", 0.0, truncation_functionals(solver, run.levels.back(), 1.0).entropy});
  }
  for (std::size_t i = 0; i < run.restarts.size(); ++i) {
    rows.push_back({"restart_mass_change", static_cast<double>(i), run.restarts[i].mass_change()});
    rows.push_back({"restart_energy_change", static_cast<double>(i), run.restarts[i].energy_change()});
  }
  return rows;
}

}  // namespace kfsi
