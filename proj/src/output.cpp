#include "koiter_fsi/output.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>

#include "koiter_fsi/error.hpp"

namespace kfsi {

const char* const kDiagnosticsHeader =
    "t,mass,kinetic,internal_gamma,internal_beta,shell_kinetic,shell_elastic,dissipation_cum,"
    "forcing_work_cum,inequality_residual,min_density,eta_sup,jac_min";
const char* const kProbesHeader = "name,param,value";
const char* const kConvergenceHeader = "iter,u_diff,eta_diff,ratio,window";
const char* const kSnapshotHeader = "t,x,y,rho,ux,uy";

void write_diagnostics(std::ostream& os, const std::vector<LedgerRow>& ledger) {
  os << kDiagnosticsHeader << '\n';
  for (const auto& r : ledger) {
    const double v[] = {r.t, r.mass, r.kinetic, r.internal_gamma, r.internal_beta, r.shell_kinetic,
                        r.shell_elastic, r.dissipation_cum, r.forcing_work_cum, r.inequality_residual,
                        r.min_density, r.eta_sup, r.jac_min};
    for (std::size_t i = 0; i < std::size(v); ++i) os << (i ? "," : "") << format_double(v[i]);
    os << '\n';
  }
}

void write_probes(std::ostream& os, const std::vector<ProbeRow>& rows) {
  os << kProbesHeader << '\n';
  for (const auto& r : rows) os << r.name << ',' << format_double(r.param) << ',' << format_double(r.value) << '\n';
}

void write_convergence(std::ostream& os, const std::vector<ConvergenceRow>& rows) {
  os << kConvergenceHeader << '\n';
  for (const auto& r : rows)
    os << r.iter << ',' << format_double(r.u_diff) << ',' << format_double(r.eta_diff) << ','
       << format_double(r.ratio) << ',' << r.window << '\n';
}

void write_snapshots(std::ostream& os, const CoupledSolver& solver,
                     const std::vector<LevelState>& levels, int count) {
  os << kSnapshotHeader << '\n';
  if (levels.empty() || count <= 0) return;
  const std::size_t n = levels.size();
  const std::size_t m = std::min<std::size_t>(n, static_cast<std::size_t>(count));
  std::size_t last = n;
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t i = m == 1 ? n - 1 : (j * (n - 1)) / (m - 1);
    if (i == last) continue;
    last = i;
    const LevelState& l = levels[i];
    const Frame f = solver.frame(l);
    const Eigen::VectorXd rho = f.rho.val * l.beta;
    Eigen::VectorXd ux, uy;
    velocity_at_nodes(f, l.alpha, ux, uy);
    for (Eigen::Index q = 0; q < rho.size(); ++q)
      os << format_double(l.t) << ',' << format_double(f.geo.y[q].x()) << ',' << format_double(f.geo.y[q].y())
         << ',' << format_double(rho[q]) << ',' << format_double(ux[q]) << ',' << format_double(uy[q]) << '\n';
  }
}

int exit_code(RunStatus s) {
  switch (s) {
    case RunStatus::Completed: return 0;
    case RunStatus::Guard: return 2;
    case RunStatus::NoConvergence: return 3;
  }
  return 1;
}

std::string status_name(RunStatus s) {
  switch (s) {
    case RunStatus::Completed: return "completed";
    case RunStatus::Guard: return "guard";
    case RunStatus::NoConvergence: return "no-convergence";
  }
  return "unknown";
}

ScenarioOutcome run_scenario(const Scenario& s, const std::string& dir, bool probes) {
  ScenarioOutcome out;
  CoupledSolver solver(to_problem(s));
  out.report = solver.run();
  out.status = out.report.status;
  out.reason = out.report.reason;
  out.exit_code = exit_code(out.status);
  if (probes && out.report.levels.size() > 1) out.probes = standard_probes(solver, out.report);
  if (dir.empty()) return out;

  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(fs::path(dir) / name);
    if (!f) throw Error(ErrorKind::ValidationError, std::string("output.dir not writable: ") + dir);
    return f;
  };
  {
    auto f = open("resolved.cfg");
    f << emit_scenario(s);
  }
  {
    auto f = open("diagnostics.csv");
    write_diagnostics(f, out.report.ledger);
  }
  {
    auto f = open("probes.csv");
    write_probes(f, out.probes);
  }
  {
    auto f = open("convergence.csv");
    write_convergence(f, out.report.convergence);
  }
  {
    auto f = open("snapshots.csv");
    write_snapshots(f, solver, out.report.levels, s.snapshots);
  }
  {
    auto f = open("status.txt");
    f << "status=" << status_name(out.status) << "\nreason=" << out.reason << "\nexit=" << out.exit_code
      << "\nwindows=" << out.report.windows << "\nrestarts=" << out.report.restarts.size() << '\n';
  }
  return out;
}

}  // namespace kfsi
