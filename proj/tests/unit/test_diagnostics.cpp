#include <doctest.h>

#include <cmath>

#include "koiter_fsi/checks.hpp"
#include "koiter_fsi/diagnostics.hpp"
#include "koiter_fsi/error.hpp"

using namespace kfsi;

TEST_CASE("knee is C1, concave and capped") {
  const double h = 1e-7;
  for (double z : {1.0, 3.0}) {
    CHECK(knee(z + h) == doctest::Approx(knee(z - h)).epsilon(1e-6));
    CHECK((knee(z + h) - knee(z)) / h == doctest::Approx((knee(z) - knee(z - h)) / h).epsilon(1e-4).scale(1.0));
  }
  CHECK(knee(0.5) == 0.5);
  CHECK(knee(10.0) == 2.0);
  for (double z = 0.1; z < 4.0; z += 0.1) {
    CHECK(knee(z) <= z + 1e-15);
    CHECK(knee_derivative(z) >= 0.0);
    CHECK(knee(z + 0.05) + knee(z - 0.05) <= 2.0 * knee(z) + 1e-12);
  }
  CHECK(truncation(5.0, 2.0) == doctest::Approx(2.0 * knee(2.5)));
}

TEST_CASE("log truncation against direct quadrature") {
  const double k = 1.5;
  for (double z : {0.5, 2.0, 4.0, 9.0}) {
    // z ln k + z ∫_k^z T_k(s)/s² ds by composite midpoint
    double ref = z < k ? z * std::log(z) : z * std::log(k);
    if (z >= k) {
      const int n = 200000;
      const double hs = (z - k) / n;
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        const double s = k + (i + 0.5) * hs;
        acc += truncation(s, k) / (s * s) * hs;
      }
      ref += z * acc;
    }
    CHECK(log_truncation(z, k) == doctest::Approx(ref).epsilon(1e-8));
  }
  CHECK(entropy_density(0.0) == 0.0);
  CHECK_THROWS_AS(entropy_density(-1.0), Error);
}

TEST_CASE("energy budget of a synthetic ledger") {
  std::vector<LedgerRow> rows(3);
  rows[0].kinetic = 1.0;
  rows[1].kinetic = 0.8;
  rows[1].dissipation_cum = 0.19;
  rows[2].kinetic = 0.7;
  rows[2].dissipation_cum = 0.3;
  rows[2].inequality_residual = 0.01;
  const EnergyReport e = energy_budget(rows);
  CHECK(e.energy0 == 1.0);
  CHECK(e.max_step_violation == doctest::Approx(0.01));
  CHECK(e.max_violation == doctest::Approx(0.01));
}

TEST_CASE("interior bump") {
  const InteriorBump b{0.4};
  CHECK(b(Vec2(0.0, 0.0)) == 1.0);
  CHECK(b(Vec2(0.45, 0.0)) == 0.0);
  CHECK(b.in_cube(Vec2(0.39, -0.39)));
  CHECK(!b.in_cube(Vec2(0.41, 0.0)));
}

TEST_CASE("probes on a short moving run") {
  Scenario s = check_base_scenario();
  s.T = 0.1;
  CoupledSolver solver(to_problem(s));
  const RunReport r = solver.run();
  REQUIRE(r.status == RunStatus::Completed);
  double prev = 1e300;
  for (double K : {10.0, 20.0, 40.0}) {
    const ConcentrationProbe p = boundary_concentration_probe(solver, r.levels, K);
    CHECK(p.boundary_mass <= prev);
    CHECK(p.xi3_trace < 1e-8);
    prev = p.boundary_mass;
  }
  const TruncationValues tv = truncation_functionals(solver, r.levels.back(), 1.0);
  CHECK(tv.T > 0.0);
  CHECK(tv.T <= r.ledger.back().mass + 1e-12);
  CHECK(higher_integrability(solver, r.levels) > 0.0);
  CHECK(entropy_residual(solver, r.levels) < 1e-3);
  const std::vector<ProbeRow> rows = standard_probes(solver, r);
  CHECK(rows.size() > 10);
}
