#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "koiter_fsi/checks.hpp"
#include "koiter_fsi/config.hpp"
#include "koiter_fsi/error.hpp"
#include "koiter_fsi/output.hpp"

using namespace kfsi;

namespace {
std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }
}  // namespace

TEST_CASE("minimal config gives the documented defaults") {
  const Scenario s = parse_scenario("# rest state\ntime.T = 0.1\n");
  Scenario d;
  d.T = 0.1;
  CHECK(s == d);
  CHECK(s.dt == 1e-2);
  CHECK(s.kappa == 1e-3);
}

TEST_CASE("parse errors carry the line number") {
  try {
    parse_scenario("time.dt = 0.01\nbogus.key = 1\n");
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_scenario("time.dt 0.01\n"), Error);
  CHECK_THROWS_AS(parse_scenario("time.dt = 0.01\ntime.dt = 0.02\n"), Error);
  CHECK_THROWS_AS(parse_scenario("time.dt = abc\n"), Error);
}

TEST_CASE("negative rho0 is rejected") {
  try {
    parse_scenario("initial.rho0 = linear\ninitial.rho0_amplitude = 2\n");
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ValidationError);
    CHECK(std::string(e.what()).find("rho0 nonnegative") != std::string::npos);
  }
}

TEST_CASE("shell velocity without matching fluid velocity is rejected") {
  try {
    parse_scenario("initial.u0 = rest\ninitial.eta1 = 0.1,0,0,0\n");
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ValidationError);
    CHECK(std::string(e.what()).find("compatibility") != std::string::npos);
  }
}

TEST_CASE("resolved config round trip") {
  Scenario s = check_base_scenario();
  s.dt = 1.0 / 3.0;
  s.epsilon = 0.1 + 0.2;
  s.seed = 123456789;
  s.u0 = "lift+swirl";
  s.u0_amplitude = 0.7;
  const Scenario back = parse_scenario(emit_scenario(s), false);
  CHECK(back == s);
  CHECK(emit_scenario(back) == emit_scenario(s));
  for (const auto& key : scenario_keys()) CHECK(get_scenario_value(back, key) == get_scenario_value(s, key));
}

TEST_CASE("seventeen significant digits") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("exit codes") {
  CHECK(exit_code(RunStatus::Completed) == 0);
  CHECK(exit_code(RunStatus::Guard) == 2);
  CHECK(exit_code(RunStatus::NoConvergence) == 3);
  CHECK(status_name(RunStatus::Guard) == "guard");
}

TEST_CASE("run writes the output files and is deterministic") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "koiter_fsi_unit_run";
  fs::remove_all(dir);
  Scenario s = check_base_scenario();
  s.T = 0.03;
  const ScenarioOutcome a = run_scenario(s, (dir / "a").string());
  const ScenarioOutcome b = run_scenario(s, (dir / "b").string());
  CHECK(a.exit_code == 0);
  for (const char* f : {"diagnostics.csv", "probes.csv", "convergence.csv", "snapshots.csv", "status.txt", "resolved.cfg"})
    CHECK(fs::exists(dir / "a" / f));
  const std::string diag = read_file(dir / "a" / "diagnostics.csv");
  CHECK(first_line(diag) == kDiagnosticsHeader);
  CHECK(diag == read_file(dir / "b" / "diagnostics.csv"));
  CHECK(first_line(read_file(dir / "a" / "snapshots.csv")) == "t,x,y,rho,ux,uy");
  CHECK(first_line(read_file(dir / "a" / "convergence.csv")) == kConvergenceHeader);
  CHECK(parse_config((dir / "a" / "resolved.cfg").string()) == s);
  fs::remove_all(dir);
}

TEST_CASE("rest-state run has vanishing residual columns") {
  Scenario s;
  s.angular_cells = 8;
  s.density_degree = 3;
  s.velocity_degree = 3;
  s.shell_modes = 3;
  s.T = 0.03;
  s.u0 = "rest";
  s.rho0_value = 0.0;
  const ScenarioOutcome o = run_scenario(s, "", false);
  REQUIRE(o.status == RunStatus::Completed);
  for (const auto& r : o.report.ledger) {
    CHECK(std::abs(r.inequality_residual) <= 1e-10);
    CHECK(r.kinetic <= 1e-10);
  }
}

TEST_CASE("forced shell with cut-off: energy does not grow after the cut") {
  Scenario s = check_base_scenario();
  s.eta1 = {0.0, 0.0, 0.0};
  s.u0 = "rest";
  s.rho0 = "constant";
  s.g = "uniform";
  s.g_amplitude = 1.0;
  s.T = 0.1;
  s.forcing_cutoff = 0.05;
  const ScenarioOutcome o = run_scenario(s, "", false);
  REQUIRE(o.status == RunStatus::Completed);
  double prev = 1e300;
  for (const auto& r : o.report.ledger) {
    if (r.t <= 0.05 + 1e-12) continue;
    CHECK(r.total_energy() <= prev + 1e-6);
    prev = r.total_energy();
  }
}

TEST_CASE("suite names") {
  CHECK(acceptance_suites().size() == 12);
  CHECK(is_check_suite("transport-oracle"));
  CHECK(!is_check_suite("nope"));
  const CheckResult r = run_check("config-roundtrip");
  CHECK(r.pass);
  const CheckResult f = run_check("config-roundtrip", CheckOptions{"config-roundtrip"});
  CHECK(!f.pass);
}
