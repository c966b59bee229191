#include <CLI11.hpp>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "koiter_fsi/checks.hpp"
#include "koiter_fsi/error.hpp"
#include "koiter_fsi/output.hpp"

using namespace kfsi;

namespace {

constexpr int kConfigError = 4;

bool config_error(ErrorKind k) { return k == ErrorKind::ParseError || k == ErrorKind::ValidationError; }

int report_error(const Error& e) {
  std::cerr << "error: " << e.what() << '\n';
  return config_error(e.kind()) ? kConfigError : 1;
}

int cmd_run(const std::string& path, const std::string& out_dir) {
  Scenario s = parse_config(path);
  if (!out_dir.empty()) s.out = out_dir;
  const ScenarioOutcome o = run_scenario(s, s.out);
  std::cout << "status=" << status_name(o.status);
  if (!o.reason.empty()) std::cout << " reason=\"" << o.reason << '"';
  std::cout << " steps=" << (o.report.ledger.empty() ? 0 : o.report.ledger.size() - 1)
            << " windows=" << o.report.windows << " out=" << s.out << '\n';
  return o.exit_code;
}

int cmd_check(const std::string& suite, const std::string& fault) {
  std::vector<std::string> suites;
  if (suite.empty() || suite == "all") {
    suites = check_suites();
  } else if (suite == "acceptance") {
    suites = acceptance_suites();
  } else {
    if (!is_check_suite(suite)) {
      std::cerr << "error: unknown suite " << suite << '\n';
      return kConfigError;
    }
    suites = {suite};
  }
  CheckOptions opt;
  opt.fault = fault;
  int failed = 0;
  for (const auto& name : suites) {
    const CheckResult r = run_check(name, opt);
    failed += r.pass ? 0 : 1;
    std::cout << format_check(r) << std::endl;
  }
  std::cout << suites.size() - failed << " passed, " << failed << " failed\n";
  return failed ? 1 : 0;
}

int cmd_oracle(const std::string& path, const std::string& out_dir) {
  const Scenario s = parse_config(path);
  const std::vector<OracleRow> rows = run_oracles(s);
  std::ostringstream os;
  os << "name,galerkin,reference,rel_error,limit,pass\n";
  bool ok = true;
  for (const auto& r : rows) {
    os << r.name << ',' << format_double(r.galerkin) << ',' << format_double(r.reference) << ','
       << format_double(r.rel_error) << ',' << format_double(r.limit) << ',' << (r.pass ? 1 : 0) << '\n';
    ok = ok && r.pass;
  }
  std::cout << os.str();
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream(std::filesystem::path(out_dir) / "oracle.csv") << os.str();
  }
  return ok ? 0 : 1;
}

unsigned worker_count(std::size_t jobs) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("KOITER_FSI_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

struct SweepPoint {
  std::string value;
  Scenario scenario;
  ScenarioOutcome outcome;
  std::string error;
  int exit_code = 0;
};

int cmd_sweep(const std::string& path, const std::string& param, const std::vector<std::string>& values,
              const std::string& out_dir) {
  const Scenario base = parse_config(path);
  const std::string root = out_dir.empty() ? base.out : out_dir;
  std::vector<SweepPoint> points(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    points[i].value = values[i];
    points[i].scenario = base;
    set_scenario_value(points[i].scenario, param, values[i]);
    validate_scenario(points[i].scenario);
    points[i].scenario.out = (std::filesystem::path(root) / (param + "=" + values[i])).string();
  }

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < points.size();) {
      SweepPoint& p = points[i];
      try {
        p.outcome = run_scenario(p.scenario, p.scenario.out);
        p.exit_code = p.outcome.exit_code;
      } catch (const Error& e) {
        p.error = e.what();
        p.exit_code = config_error(e.kind()) ? kConfigError : 1;
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned n = worker_count(points.size());
  for (unsigned w = 1; w < n; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  // single collector, input order
  std::filesystem::create_directories(root);
  std::ofstream csv(std::filesystem::path(root) / "sweep.csv");
  csv << "param,value,status,exit,t,mass,internal_beta,min_density,eta_sup,inequality_residual\n";
  int code = 0;
  for (const SweepPoint& p : points) {
    const auto& L = p.outcome.report.ledger;
    const std::string status = p.error.empty() ? status_name(p.outcome.status) : "error";
    csv << param << ',' << p.value << ',' << status << ',' << p.exit_code;
    if (!L.empty()) {
      const LedgerRow& r = L.back();
      for (double v : {r.t, r.mass, r.internal_beta, r.min_density, r.eta_sup, r.inequality_residual})
        csv << ',' << format_double(v);
    } else {
      csv << ",,,,,,";
    }
    csv << '\n';
    std::cout << param << '=' << p.value << ' ' << status;
    if (!p.error.empty()) std::cout << " (" << p.error << ')';
    std::cout << '\n';
    if (code == 0) code = p.exit_code;
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compressible fluid in a Koiter-shell domain: runs, checks, oracles and sweeps"};
  app.require_subcommand(1);

  std::string config, out_dir, suite, fault, param, values;

  auto* run = app.add_subcommand("run", "run a scenario");
  run->add_option("config", config, "scenario file")->required();
  run->add_option("--out", out_dir, "output directory (overrides output.dir)");

  auto* check = app.add_subcommand("check", "invariant and acceptance suite");
  check->add_option("--suite", suite, "suite name, 'acceptance' or 'all'");
  check->add_option("--fault", fault, "corrupt the named suite's measurement");

  auto* oracle = app.add_subcommand("oracle", "finite-difference references for a scenario");
  oracle->add_option("config", config, "scenario file")->required();
  oracle->add_option("--out", out_dir, "also write oracle.csv here");

  auto* sweep = app.add_subcommand("sweep", "run a scenario over a list of parameter values");
  sweep->add_option("config", config, "scenario file")->required();
  sweep->add_option("--param", param, "scenario key, e.g. layers.delta")->required();
  sweep->add_option("--values", values, "comma-separated values")->required();
  sweep->add_option("--out", out_dir, "root output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  try {
    if (*run) return cmd_run(config, out_dir);
    if (*check) return cmd_check(suite, fault);
    if (*oracle) return cmd_oracle(config, out_dir);
    if (*sweep) {
      std::vector<std::string> list;
      std::stringstream ss(values);
      for (std::string v; std::getline(ss, v, ',');)
        if (!v.empty()) list.push_back(v);
      if (list.empty()) {
        std::cerr << "error: --values is empty\n";
        return kConfigError;
      }
      return cmd_sweep(config, param, list, out_dir);
    }
  } catch (const Error& e) {
    return report_error(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
