#include <doctest.h>

#include <cmath>

#include "koiter_fsi/checks.hpp"
#include "koiter_fsi/config.hpp"
#include "koiter_fsi/error.hpp"

using namespace kfsi;

namespace {
Scenario small() {
  Scenario s = check_base_scenario();
  s.T = 0.05;
  return s;
}
}  // namespace

// A constant pressure pushes the shell outwards, so the only exact rest state is vacuum.
TEST_CASE("rest state stays at rest") {
  Scenario s = small();
  s.rho0 = "constant";
  s.rho0_value = 0.0;
  s.eta1 = {0.0, 0.0, 0.0};
  s.u0 = "rest";
  CoupledSolver solver(to_problem(s));
  const RunReport r = solver.run();
  REQUIRE(r.status == RunStatus::Completed);
  for (const auto& row : r.ledger) {
    CHECK(row.kinetic < 1e-10);
    CHECK(row.eta_sup < 1e-10);
    CHECK(std::abs(row.inequality_residual) < 1e-10);
    CHECK(row.trace_residual < 1e-10);
  }
}

TEST_CASE("moving shell: mass, trace and energy per step") {
  CoupledSolver solver(to_problem(small()));
  const RunReport r = solver.run();
  REQUIRE(r.status == RunStatus::Completed);
  const double m0 = r.ledger.front().mass;
  const double e0 = r.ledger.front().total_energy();
  for (const auto& row : r.ledger) {
    CHECK(std::abs(row.mass - m0) / m0 < 1e-10);
    CHECK(row.trace_residual < 1e-8);
    CHECK(std::abs(row.step_residual) < 1e-4 * e0);
    CHECK(row.min_density > 0.0);
  }
  CHECK(r.ledger.back().eta_sup > 1e-3);
  for (const auto& c : r.convergence) CHECK(c.iter <= 50);
}

TEST_CASE("fixed point contracts") {
  CoupledSolver solver(to_problem(small()));
  std::vector<ConvergenceRow> h;
  const WindowResult w = solver.fixed_point_iterate(solver.initial_state(), 3, 0, &h);
  REQUIRE(h.size() >= 3);
  CHECK(h.back().u_diff + h.back().eta_diff <= 1e-6);
  for (std::size_t i = 2; i < h.size(); ++i) CHECK(h[i].ratio < 1.0);
  CHECK(w.solution.levels.size() == 4);
}

TEST_CASE("restart keeps mass and energy") {
  Scenario s = small();
  s.T = 0.1;
  s.window = 0.05;
  CoupledSolver solver(to_problem(s));
  const RunReport r = solver.run();
  REQUIRE(r.status == RunStatus::Completed);
  REQUIRE(!r.restarts.empty());
  for (const auto& rr : r.restarts) {
    CHECK(rr.mass_change() < 1e-10);
    CHECK(rr.energy_change() < 1e-10);
    CHECK(rr.injectivity_defect < 1e-8);
    CHECK(rr.new_tube_width > 0.0);
  }
}

TEST_CASE("guard stops a run near self-contact") {
  CHECK(self_intersection_guard(0.3, 1.0, 0.5, 0.45, 1e-4) == GuardReason::Displacement);
  CHECK(self_intersection_guard(0.1, 1e-6, 0.5, 0.45, 1e-4) == GuardReason::Jacobian);
  CHECK(self_intersection_guard(0.1, 0.9, 0.5, 0.45, 1e-4) == GuardReason::None);
  Scenario s = small();
  s.shell_m = 1e-3;
  s.eta0 = {0.2, 0.0, 0.0};
  s.eta1 = {0.3, 0.0, 0.0};
  s.T = 0.5;
  CoupledSolver solver(to_problem(s));
  const RunReport r = solver.run();
  CHECK(r.status == RunStatus::Guard);
  CHECK(!r.reason.empty());
  CHECK(r.ledger.back().t < 0.5);
}

TEST_CASE("incompatible initial velocity is rejected") {
  ProblemData d = to_problem(small());
  d.lift_u0 = false;
  d.u0 = nullptr;
  CHECK_THROWS_AS(CoupledSolver{d}, Error);
  try {
    CoupledSolver solver(d);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CompatibilityViolation);
  }
}
