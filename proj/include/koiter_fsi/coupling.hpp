#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "koiter_fsi/geometry.hpp"
#include "koiter_fsi/momentum.hpp"
#include "koiter_fsi/shell.hpp"
#include "koiter_fsi/transport.hpp"

namespace kfsi {

struct CouplingConfig {
  double theta_mix = 0.5;
  double tol = 1e-6;
  int max_iters = 50;
  double window = 0.0;  // initial T_*; 0 means the whole horizon
  bool restart = true;  // re-centre the chart after every accepted window
  double guard_fraction = 0.45;
  double jacobian_floor = 1e-4;

  void validate() const;
};

/// Everything a coupled run needs. Initial density and velocity are given on the reference
/// domain (pulled back by the initial chart).
struct ProblemData {
  DomainOptions domain;
  ShellParams shell;
  FluidParams fluid;
  int n_shell = 4;
  int density_degree = 4;
  int velocity_degree = 4;
  double dt = 1e-2;
  double horizon = 0.2;
  CouplingConfig coupling;
  bool shell_only = false;

  Eigen::VectorXd eta0;  // shell coefficients
  Eigen::VectorXd eta1;
  std::function<double(const Vec2&)> rho0;
  std::function<Vec2(const Vec2&)> u0;
  // adds Σ η1_k Y_k to u0 (u0 then carries only a zero-trace part)
  bool lift_u0 = false;
  BodyForce f;
  ShellLoad g;
};

/// State at one time level. `layers` counts the frozen restart layers of its chart.
struct LevelState {
  double t = 0.0;
  Eigen::VectorXd beta;   // density coefficients
  Eigen::VectorXd alpha;  // velocity coefficients
  Eigen::VectorXd c;      // absolute shell displacement coefficients
  Eigen::VectorXd geom;   // chart coefficients (the regularized displacement)
  Eigen::VectorXd rate;   // chart rate used for V at this level
  int layers = 0;
};

struct LedgerRow {
  double t = 0.0;
  double mass = 0.0;
  double kinetic = 0.0;
  double internal_gamma = 0.0;
  double internal_beta = 0.0;
  double shell_kinetic = 0.0;
  double shell_elastic = 0.0;
  double dissipation_cum = 0.0;
  double forcing_work_cum = 0.0;
  double inequality_residual = 0.0;
  double min_density = 0.0;
  double eta_sup = 0.0;
  double jac_min = 0.0;
  // not part of the csv schema
  double step_residual = 0.0;
  double trace_residual = 0.0;

  double total_energy() const {
    return kinetic + internal_gamma + internal_beta + shell_kinetic + shell_elastic;
  }
};

struct ConvergenceRow {
  int window = 0;
  int iter = 0;
  double u_diff = 0.0;
  double eta_diff = 0.0;
  double ratio = 0.0;
};

/// Output of one evaluation of the decoupled map (ζ, v) ↦ (η, u, ρ).
struct DecoupledSolution {
  std::vector<LevelState> levels;
  std::vector<StepEnergy> energy;
  std::vector<double> internal_dissipation;  // dt ε∫P''(ρ)|∇ρ|² per step
  std::vector<double> transport_min;
  std::vector<double> trace_residual;  // per level
  std::vector<Eigen::MatrixXd> inertia;  // 𝒜 per level
};

struct WindowResult {
  DecoupledSolution solution;
  std::vector<ConvergenceRow> history;
  int iterations = 0;
};

struct RestartReport {
  double mass_before = 0.0, mass_after = 0.0;
  double energy_before = 0.0, energy_after = 0.0;
  double new_tube_width = 0.0;
  double injectivity_defect = 0.0;

  double mass_change() const;
  double energy_change() const;
};

enum class GuardReason { None, Displacement, Jacobian };
std::string to_string(GuardReason r);

/// Stops when ‖η‖_∞ ≥ fraction·L or min J ≤ floor.
GuardReason self_intersection_guard(double eta_sup, double jac_min, double tube_width,
                                    double fraction = 0.45, double jac_floor = 1e-4);

enum class RunStatus { Completed, Guard, NoConvergence };

struct RunReport {
  RunStatus status = RunStatus::Completed;
  std::string reason;
  std::vector<LedgerRow> ledger;
  std::vector<ConvergenceRow> convergence;
  std::vector<LevelState> levels;
  std::vector<RestartReport> restarts;
  int windows = 0;
  int window_shrinks = 0;
};

class CoupledSolver {
 public:
  explicit CoupledSolver(ProblemData data);
  CoupledSolver(const CoupledSolver&) = delete;
  CoupledSolver& operator=(const CoupledSolver&) = delete;

  const ProblemData& data() const { return data_; }
  const ReferenceDomain& reference() const { return *ref_; }
  const ShellBasis& shell() const { return *shell_; }
  const GalerkinSpace& space() const { return *space_; }
  const MomentumSolver& momentum() const { return *momentum_; }
  const LevelState& initial_state() const { return initial_; }

  /// Frozen layer coefficients (increments) in order.
  const std::vector<Eigen::VectorXd>& frozen_layers() const { return frozen_; }
  Eigen::VectorXd base_coefficients(int layers) const;

  DomainChart chart(const Eigen::VectorXd& c, const Eigen::VectorXd& rate, int layers) const;
  Frame frame(const Eigen::VectorXd& c, const Eigen::VectorXd& rate, int layers, double t) const;
  Frame frame(const LevelState& s) const;

  /// (M_bound): (‖ζ(t₀)‖_∞ + L̃/2)/2 for the moving displacement of the window start.
  double window_bound(const LevelState& s0) const;

  /// One evaluation of the decoupled solve for given (ζ_k, v_k) on the window.
  DecoupledSolution solve_decoupled(const LevelState& s0, const std::vector<Eigen::VectorXd>& zeta,
                                    const std::vector<Eigen::VectorXd>& v, int steps) const;

  /// Damped Picard iteration on a window of `steps` steps. Throws NoConvergence or
  /// WindowShrunk.
  /// The rows of every iteration are appended to `history` when given, also on failure.
  WindowResult fixed_point_iterate(const LevelState& s0, int steps, int window_index = 0,
                                   std::vector<ConvergenceRow>* history = nullptr) const;

  /// Re-centres the chart on the current displacement and re-expresses the state.
  RestartReport continuation_restart(LevelState& s);

  LedgerRow ledger_row(const LevelState& s) const;

  /// Full run over [0, T].
  RunReport run();

 private:
  ProblemData data_;
  std::unique_ptr<ReferenceDomain> ref_;
  std::unique_ptr<ShellBasis> shell_;
  std::unique_ptr<GalerkinSpace> space_;
  std::unique_ptr<MomentumSolver> momentum_;
  std::vector<Eigen::VectorXd> frozen_;
  LevelState initial_;
};

/// Mass, internal energies and kinetic energy of a level in its frame.
struct LevelEnergy {
  double mass = 0.0;
  double kinetic = 0.0;
  double internal_gamma = 0.0;
  double internal_beta = 0.0;
  double shell_kinetic = 0.0;
  double shell_elastic = 0.0;
  double min_density = 0.0;

  double total() const { return kinetic + internal_gamma + internal_beta + shell_kinetic + shell_elastic; }
};

LevelEnergy level_energy(const CoupledSolver& solver, const LevelState& s, const Frame& f);

}  // namespace kfsi
