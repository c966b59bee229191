#pragma once

#include <string>
#include <vector>

#include "koiter_fsi/config.hpp"

namespace kfsi {

struct CheckOptions {
  // Name of a suite whose measurement gets corrupted (harness self-test).
  std::string fault;
};

struct CheckResult {
  int criterion = 0;  // 1..12 for acceptance items, 0 for module invariants
  std::string suite;
  bool pass = false;
  double value = 0.0;
  double limit = 0.0;
  std::string detail;
};

/// Suite names in run order: the twelve acceptance items, then module invariants.
const std::vector<std::string>& check_suites();
const std::vector<std::string>& acceptance_suites();
bool is_check_suite(const std::string& name);

CheckResult run_check(const std::string& suite, const CheckOptions& opt = {});
std::vector<CheckResult> run_checks(const std::vector<std::string>& suites, const CheckOptions& opt = {});

/// One table line: "[PASS] 4 transport-oracle value=... limit=... detail".
std::string format_check(const CheckResult& r);

/// Small moving-shell scenario the suite is built on.
Scenario check_base_scenario();

struct OracleRow {
  std::string name;
  double galerkin = 0.0;
  double reference = 0.0;
  double rel_error = 0.0;
  double limit = 0.0;
  bool pass = false;
};

/// Finite-difference references for a scenario: shell spectrum, static shell deflection
/// under the load, and the ε-heat square.
std::vector<OracleRow> run_oracles(const Scenario& s);

}  // namespace kfsi
