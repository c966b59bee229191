#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "koiter_fsi/coupling.hpp"

namespace kfsi {

/// Scenario file contents. Every field has a documented default; the file format is one
/// `section.key = value` per line, `#` starts a comment.
struct Scenario {
  // domain
  double radius = 1.0;
  double tube_width = 0.5;
  int core_cells = 2;
  int layer_cells = 3;
  int radial_order = 4;
  int angular_cells = 16;
  int angular_order = 4;

  // shell
  int shell_modes = 4;
  double shell_m = 1.0;
  double shell_b2 = 0.0;
  double shell_b0 = 0.0;

  // fluid and layers
  double mu = 1.0;
  double lambda = 0.0;
  double a = 1.0;
  double gamma = 2.0;
  double kappa = 1e-3;
  double epsilon = 1e-2;
  double delta = 0.0;
  double beta = 4.0;

  // discretization
  int density_degree = 4;
  int velocity_degree = 4;
  double dt = 1e-2;
  double T = 0.2;

  // coupling
  double theta_mix = 0.5;
  double tol = 1e-6;
  int max_iters = 50;
  double window = 0.0;
  bool restart = true;
  double guard_fraction = 0.45;
  double jacobian_floor = 1e-4;
  bool shell_only = false;

  // initial data
  std::string rho0 = "constant";  // constant | linear | cosine
  double rho0_value = 1.0;
  double rho0_amplitude = 0.0;
  std::vector<double> eta0;
  std::vector<double> eta1;
  std::string u0 = "lift";  // rest | lift | lift+swirl | uniform
  double u0_amplitude = 0.0;

  // forcing
  std::string f = "none";  // none | gravity | swirl
  double f_amplitude = 0.0;
  std::string g = "none";  // none | uniform | mode
  double g_amplitude = 0.0;
  int g_mode = 0;
  double forcing_cutoff = -1.0;  // forcing switched off after this time (< 0: never)

  // output
  std::string out = "out";
  int snapshots = 5;
  std::uint64_t seed = 0;

  bool operator==(const Scenario&) const = default;
};

/// All recognized keys in emission order.
const std::vector<std::string>& scenario_keys();

/// Sets one key from its text value. Throws ParseError on unknown keys or bad values.
void set_scenario_value(Scenario& s, const std::string& key, const std::string& value);
std::string get_scenario_value(const Scenario& s, const std::string& key);

/// Parses the text of a scenario file (errors carry line numbers) and validates it.
Scenario parse_scenario(const std::string& text, bool validate = true);
Scenario parse_config(const std::string& path);

/// Resolved configuration with every key, numbers at 17 significant digits.
std::string emit_scenario(const Scenario& s);

/// Throws ValidationError naming the violated invariant ("rho0 nonnegative",
/// "compatibility", ...).
void validate_scenario(const Scenario& s);

/// Builds the solver input for a scenario.
ProblemData to_problem(const Scenario& s);

std::string format_double(double v);

}  // namespace kfsi
