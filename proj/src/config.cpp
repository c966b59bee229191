#include "koiter_fsi/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <memory>
#include <numbers>
#include <set>
#include <sstream>

#include "koiter_fsi/error.hpp"

namespace kfsi {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct BadValue {
  std::string what;
};

double to_double(const std::string& v) {
  const std::string t = trim(v);
  if (t.empty()) throw BadValue{"empty number"};
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(t.c_str(), &end);
  if (*end != '\0' || errno == ERANGE) throw BadValue{"not a number: '" + t + "'"};
  return x;
}

long long to_integer(const std::string& v) {
  const std::string t = trim(v);
  char* end = nullptr;
  errno = 0;
  const long long x = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || *end != '\0' || errno == ERANGE) throw BadValue{"not an integer: '" + t + "'"};
  return x;
}

bool to_bool(const std::string& v) {
  const std::string t = trim(v);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw BadValue{"not a boolean: '" + t + "'"};
}

std::vector<double> to_list(const std::string& v) {
  std::vector<double> out;
  const std::string t = trim(v);
  if (t.empty()) return out;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(item));
  return out;
}

struct Field {
  std::string key;
  std::function<void(Scenario&, const std::string&)> set;
  std::function<std::string(const Scenario&)> get;
};

template <class T>
Field make_field(std::string key, T Scenario::*m) {
  Field f;
  f.key = std::move(key);
  if constexpr (std::is_same_v<T, double>) {
    f.set = [m](Scenario& s, const std::string& v) { s.*m = to_double(v); };
    f.get = [m](const Scenario& s) { return format_double(s.*m); };
  } else if constexpr (std::is_same_v<T, int>) {
    f.set = [m](Scenario& s, const std::string& v) { s.*m = static_cast<int>(to_integer(v)); };
    f.get = [m](const Scenario& s) { return std::to_string(s.*m); };
  } else if constexpr (std::is_same_v<T, std::uint64_t>) {
    f.set = [m](Scenario& s, const std::string& v) {
      const long long x = to_integer(v);
      if (x < 0) throw BadValue{"seed must be nonnegative"};
      s.*m = static_cast<std::uint64_t>(x);
    };
    f.get = [m](const Scenario& s) { return std::to_string(s.*m); };
  } else if constexpr (std::is_same_v<T, bool>) {
    f.set = [m](Scenario& s, const std::string& v) { s.*m = to_bool(v); };
    f.get = [m](const Scenario& s) { return std::string(s.*m ? "true" : "false"); };
  } else if constexpr (std::is_same_v<T, std::string>) {
    f.set = [m](Scenario& s, const std::string& v) { s.*m = trim(v); };
    f.get = [m](const Scenario& s) { return s.*m; };
  } else {
    f.set = [m](Scenario& s, const std::string& v) { s.*m = to_list(v); };
    f.get = [m](const Scenario& s) {
      std::string out;
      for (std::size_t i = 0; i < (s.*m).size(); ++i) {
        if (i) out += ", ";
        out += format_double((s.*m)[i]);
      }
      return out;
    };
  }
  return f;
}

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      make_field("domain.radius", &Scenario::radius),
      make_field("domain.tube_width", &Scenario::tube_width),
      make_field("domain.core_cells", &Scenario::core_cells),
      make_field("domain.layer_cells", &Scenario::layer_cells),
      make_field("domain.radial_order", &Scenario::radial_order),
      make_field("domain.angular_cells", &Scenario::angular_cells),
      make_field("domain.angular_order", &Scenario::angular_order),
      make_field("shell.modes", &Scenario::shell_modes),
      make_field("shell.m", &Scenario::shell_m),
      make_field("shell.b2", &Scenario::shell_b2),
      make_field("shell.b0", &Scenario::shell_b0),
      make_field("fluid.mu", &Scenario::mu),
      make_field("fluid.lambda", &Scenario::lambda),
      make_field("fluid.a", &Scenario::a),
      make_field("fluid.gamma", &Scenario::gamma),
      make_field("layers.kappa", &Scenario::kappa),
      make_field("layers.epsilon", &Scenario::epsilon),
      make_field("layers.delta", &Scenario::delta),
      make_field("layers.beta", &Scenario::beta),
      make_field("basis.density_degree", &Scenario::density_degree),
      make_field("basis.velocity_degree", &Scenario::velocity_degree),
      make_field("time.dt", &Scenario::dt),
      make_field("time.T", &Scenario::T),
      make_field("coupling.theta_mix", &Scenario::theta_mix),
      make_field("coupling.tol", &Scenario::tol),
      make_field("coupling.max_iters", &Scenario::max_iters),
      make_field("coupling.window", &Scenario::window),
      make_field("coupling.restart", &Scenario::restart),
      make_field("coupling.shell_only", &Scenario::shell_only),
      make_field("guard.fraction", &Scenario::guard_fraction),
      make_field("guard.jacobian_floor", &Scenario::jacobian_floor),
      make_field("initial.rho0", &Scenario::rho0),
      make_field("initial.rho0_value", &Scenario::rho0_value),
      make_field("initial.rho0_amplitude", &Scenario::rho0_amplitude),
      make_field("initial.eta0", &Scenario::eta0),
      make_field("initial.eta1", &Scenario::eta1),
      make_field("initial.u0", &Scenario::u0),
      make_field("initial.u0_amplitude", &Scenario::u0_amplitude),
      make_field("forcing.f", &Scenario::f),
      make_field("forcing.f_amplitude", &Scenario::f_amplitude),
      make_field("forcing.g", &Scenario::g),
      make_field("forcing.g_amplitude", &Scenario::g_amplitude),
      make_field("forcing.g_mode", &Scenario::g_mode),
      make_field("forcing.cutoff", &Scenario::forcing_cutoff),
      make_field("output.dir", &Scenario::out),
      make_field("output.snapshots", &Scenario::snapshots),
      make_field("run.seed", &Scenario::seed),
  };
  return f;
}

const Field* find_field(const std::string& key) {
  for (const auto& f : fields())
    if (f.key == key) return &f;
  return nullptr;
}

Eigen::VectorXd padded(const std::vector<double>& v, int n) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < v.size() && static_cast<int>(i) < n; ++i) out[i] = v[i];
  return out;
}

}  // namespace

const std::vector<std::string>& scenario_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

void set_scenario_value(Scenario& s, const std::string& key, const std::string& value) {
  const Field* f = find_field(key);
  if (!f) throw Error(ErrorKind::ParseError, "unknown key '" + key + "'");
  try {
    f->set(s, value);
  } catch (const BadValue& b) {
    throw Error(ErrorKind::ParseError, key + ": " + b.what);
  }
}

std::string get_scenario_value(const Scenario& s, const std::string& key) {
  const Field* f = find_field(key);
  if (!f) throw Error(ErrorKind::ParseError, "unknown key '" + key + "'");
  return f->get(s);
}

Scenario parse_scenario(const std::string& text, bool validate) {
  Scenario s;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(no) + ": ";
    if (eq == std::string::npos) throw Error(ErrorKind::ParseError, where + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const Field* f = find_field(key);
    if (!f) throw Error(ErrorKind::ParseError, where + "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw Error(ErrorKind::ParseError, where + "duplicate key '" + key + "'");
    try {
      f->set(s, value);
    } catch (const BadValue& b) {
      throw Error(ErrorKind::ParseError, where + key + ": " + b.what);
    }
  }
  if (validate) validate_scenario(s);
  return s;
}

Scenario parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string emit_scenario(const Scenario& s) {
  std::string out;
  for (const auto& f : fields()) out += f.key + " = " + f.get(s) + "\n";
  return out;
}

void validate_scenario(const Scenario& s) {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::ValidationError, what); };
  if (s.rho0 != "constant" && s.rho0 != "linear" && s.rho0 != "cosine") fail("initial.rho0 preset unknown");
  if (s.u0 != "rest" && s.u0 != "lift" && s.u0 != "lift+swirl" && s.u0 != "uniform")
    fail("initial.u0 preset unknown");
  if (s.f != "none" && s.f != "gravity" && s.f != "swirl") fail("forcing.f preset unknown");
  if (s.g != "none" && s.g != "uniform" && s.g != "mode") fail("forcing.g preset unknown");
  if (s.g_mode < 0 || s.g_mode >= s.shell_modes) fail("forcing.g_mode within shell.modes");
  if (static_cast<int>(s.eta0.size()) > s.shell_modes || static_cast<int>(s.eta1.size()) > s.shell_modes)
    fail("initial.eta0 and initial.eta1 at most shell.modes entries");
  if (s.snapshots < 0) fail("output.snapshots nonnegative");
  if (s.out.empty()) fail("output.dir nonempty");
  // rho0 lower bound over the whole disk for the presets
  const double lo = s.rho0 == "constant" ? s.rho0_value : s.rho0_value - std::abs(s.rho0_amplitude);
  if (lo < 0.0) fail("rho0 nonnegative");
  try {
    CoupledSolver probe(to_problem(s));
  } catch (const Error& e) {
    switch (e.kind()) {
      case ErrorKind::CompatibilityViolation:
        fail(std::string("compatibility: ") + e.what());
        break;
      case ErrorKind::DisplacementTooLarge:
        fail("eta0 below half the tube width");
        break;
      case ErrorKind::ValidationError:
        throw;
      default:
        fail(std::string("scenario rejected: ") + e.what());
    }
  }
}

ProblemData to_problem(const Scenario& s) {
  ProblemData d;
  d.domain.radius = s.radius;
  d.domain.tube_width = s.tube_width;
  d.domain.core_cells = s.core_cells;
  d.domain.layer_cells = s.layer_cells;
  d.domain.radial_order = s.radial_order;
  d.domain.angular_cells = s.angular_cells;
  d.domain.angular_order = s.angular_order;
  d.shell = ShellParams{s.shell_m, s.shell_b2, s.shell_b0};
  d.fluid.mu = s.mu;
  d.fluid.lambda = s.lambda;
  d.fluid.a = s.a;
  d.fluid.gamma = s.gamma;
  d.fluid.kappa = s.kappa;
  d.fluid.epsilon = s.epsilon;
  d.fluid.delta = s.delta;
  d.fluid.beta = s.beta;
  d.n_shell = s.shell_modes;
  d.density_degree = s.density_degree;
  d.velocity_degree = s.velocity_degree;
  d.dt = s.dt;
  d.horizon = s.T;
  d.coupling.theta_mix = s.theta_mix;
  d.coupling.tol = s.tol;
  d.coupling.max_iters = s.max_iters;
  d.coupling.window = s.window;
  d.coupling.restart = s.restart;
  d.coupling.guard_fraction = s.guard_fraction;
  d.coupling.jacobian_floor = s.jacobian_floor;
  d.shell_only = s.shell_only;
  d.eta0 = padded(s.eta0, s.shell_modes);
  d.eta1 = padded(s.eta1, s.shell_modes);

  const double R = s.radius;
  const double v0 = s.rho0_value, a0 = s.rho0_amplitude;
  if (s.rho0 == "constant") {
    d.rho0 = [v0](const Vec2&) { return v0; };
  } else if (s.rho0 == "linear") {
    d.rho0 = [v0, a0, R](const Vec2& x) { return v0 + a0 * x.x() / R; };
  } else {
    d.rho0 = [v0, a0, R](const Vec2& x) { return v0 + a0 * std::cos(std::numbers::pi * x.norm() / R); };
  }

  const double ua = s.u0_amplitude;
  if (s.u0 == "lift") {
    d.lift_u0 = true;
  } else if (s.u0 == "lift+swirl") {
    d.lift_u0 = true;
    d.u0 = [ua, R](const Vec2& x) -> Vec2 {
      const double w = ua * (1.0 - x.squaredNorm() / (R * R));
      return Vec2(-w * x.y(), w * x.x());
    };
  } else if (s.u0 == "uniform") {
    d.u0 = [ua](const Vec2&) -> Vec2 { return Vec2(ua, 0.0); };
  }

  const double cut = s.forcing_cutoff;
  auto on = [cut](double t) { return cut < 0.0 || t <= cut; };
  const double fa = s.f_amplitude;
  if (s.f == "gravity") {
    d.f = [fa, on](double t, const Vec2&) -> Vec2 { return on(t) ? Vec2(0.0, -fa) : Vec2::Zero(); };
  } else if (s.f == "swirl") {
    d.f = [fa, on](double t, const Vec2& x) -> Vec2 { return on(t) ? Vec2(-fa * x.y(), fa * x.x()) : Vec2::Zero(); };
  }
  const double ga = s.g_amplitude;
  if (s.g == "uniform") {
    d.g = [ga, on](double t, double) { return on(t) ? ga : 0.0; };
  } else if (s.g == "mode") {
    const ReferenceDomain ref(d.domain);
    auto basis = std::make_shared<ShellBasis>(s.shell_modes, ref.shell_length());
    const int k = s.g_mode;
    d.g = [ga, on, basis, k](double t, double a) { return on(t) ? ga * basis->value(k, a) : 0.0; };
  }
  return d;
}

}  // namespace kfsi
