#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "koiter_fsi/config.hpp"
#include "koiter_fsi/diagnostics.hpp"

namespace kfsi {

extern const char* const kDiagnosticsHeader;
extern const char* const kProbesHeader;
extern const char* const kConvergenceHeader;
extern const char* const kSnapshotHeader;

void write_diagnostics(std::ostream& os, const std::vector<LedgerRow>& ledger);
void write_probes(std::ostream& os, const std::vector<ProbeRow>& rows);
void write_convergence(std::ostream& os, const std::vector<ConvergenceRow>& rows);
/// Field values at the frame nodes for `count` levels spread over the run.
void write_snapshots(std::ostream& os, const CoupledSolver& solver,
                     const std::vector<LevelState>& levels, int count);

int exit_code(RunStatus s);
std::string status_name(RunStatus s);

struct ScenarioOutcome {
  RunStatus status = RunStatus::Completed;
  std::string reason;
  int exit_code = 0;
  RunReport report;
  std::vector<ProbeRow> probes;
};

/// Runs a scenario and, when `dir` is nonempty, writes diagnostics.csv, probes.csv,
/// convergence.csv, snapshots.csv, status.txt and resolved.cfg there.
ScenarioOutcome run_scenario(const Scenario& s, const std::string& dir, bool probes = true);

}  // namespace kfsi
