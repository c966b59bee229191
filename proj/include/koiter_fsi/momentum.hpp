#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "koiter_fsi/basis.hpp"
#include "koiter_fsi/geometry.hpp"
#include "koiter_fsi/shell.hpp"
#include "koiter_fsi/transport.hpp"

namespace kfsi {

struct FluidParams {
  double mu = 1.0;
  double lambda = 0.0;
  double a = 1.0;
  double gamma = 2.0;
  double delta = 0.0;
  double beta = 4.0;
  double epsilon = 1e-2;
  double kappa = 1e-3;

  void validate() const;

  /// a|ρ|^γ + δ|ρ|^β
  double pressure(double rho) const;
  /// a/(γ−1)|ρ|^γ and δ/(β−1)|ρ|^β
  double internal_gamma(double rho) const;
  double internal_beta(double rho) const;
  /// second derivative of the internal energy density
  double internal_d2(double rho) const;
};

using BodyForce = std::function<Vec2(double, const Vec2&)>;
using ShellLoad = std::function<double(double, double)>;  // (t, arc coordinate)

/// Bases and their reference tables at the interior quadrature nodes.
class GalerkinSpace {
 public:
  GalerkinSpace(const ReferenceDomain& ref, const ShellBasis& shell, int density_degree,
                int velocity_degree);

  const ReferenceDomain& reference() const { return *ref_; }
  const ShellBasis& shell() const { return *shell_; }
  const DensityBasis& density() const { return density_; }
  const VelocityBasis& velocity() const { return velocity_; }
  const ScalarTable& density_table() const { return rho_ref_; }
  const VectorTable& velocity_table() const { return u_ref_; }
  /// Boundary-node values of the velocity basis (columns = modes).
  const Eigen::MatrixXd& boundary_ux() const { return bux_; }
  const Eigen::MatrixXd& boundary_uy() const { return buy_; }

  int n_density() const { return density_.size(); }
  int n_velocity() const { return velocity_.size(); }
  int n_shell() const { return shell_->size(); }
  /// E_Y: shell coefficients → velocity slots.
  const Eigen::MatrixXd& shell_embedding() const { return velocity_.shell_embedding(); }

 private:
  const ReferenceDomain* ref_;
  const ShellBasis* shell_;
  DensityBasis density_;
  VelocityBasis velocity_;
  ScalarTable rho_ref_;
  VectorTable u_ref_;
  Eigen::MatrixXd bux_, buy_;
};

/// Physical tables at one time level.
struct Frame {
  double t = 0.0;
  FrameGeometry geo;
  ScalarTable rho;
  VectorTable u;
};

Frame make_frame(const GalerkinSpace& space, const DomainChart& chart, double t);

/// Transport view of a frame with drift coefficients `drift` (may be empty for w = 0).
ScalarFrame scalar_frame(const Frame& f, const Eigen::VectorXd& drift);

/// Nodal velocity and its divergence for coefficients α.
void velocity_at_nodes(const Frame& f, const Eigen::VectorXd& alpha, Eigen::VectorXd& ux,
                       Eigen::VectorXd& uy);
Eigen::VectorXd divergence_at_nodes(const Frame& f, const Eigen::VectorXd& alpha);

/// ∫ω_i·ω_j over the frame.
Eigen::MatrixXd velocity_gram(const Frame& f);

/// 𝒜 = ∫(ρ+κ)ω_i·ω_j + ∫_M w_i w_j. Throws NotSPD when the Cholesky factorization fails.
Eigen::MatrixXd inertia_matrix(const GalerkinSpace& space, const Frame& f,
                               const Eigen::VectorXd& rho_nodal, double kappa);

/// Midpoint operators of the momentum equation (row = test mode, column = trial mode).
struct MomentumOperators {
  Eigen::MatrixXd convective;  // ∫ρ ω_j·((w − V)·∇)ω_i
  Eigen::MatrixXd eps_mass;    // ∫ρ ∇ω_i:∇ω_j
  Eigen::MatrixXd eps_cross;   // ∫Σ_c ω_i^c ∇ρ·∇ω_j^c
  Eigen::MatrixXd viscous;     // ∫∇ω_i:∇ω_j
  Eigen::MatrixXd div;         // ∫div ω_i div ω_j
  Eigen::VectorXd pressure;    // ∫p(ρ) div ω_j
  Eigen::VectorXd force;       // ∫ρ f·ω_j + ∫_M g w_j

  /// Skew convective and ε parts plus the dissipative blocks.
  Eigen::MatrixXd operator_matrix(const FluidParams& p) const;
  /// The symmetric dissipative part εE_ρ + μG + (λ+μ)D.
  Eigen::MatrixXd dissipative_matrix(const FluidParams& p) const;
};

struct MidpointData {
  Eigen::VectorXd rho;     // nodal density
  Eigen::VectorXd rho_x, rho_y;
  Eigen::VectorXd wx, wy;  // drift
};

MomentumOperators assemble_momentum(const GalerkinSpace& space, const Frame& fm,
                                    const MidpointData& d, const FluidParams& p,
                                    const BodyForce& f, const ShellLoad& g);

/// Coefficients of ∫_M g(t, ·) w_k.
Eigen::VectorXd shell_load_vector(const ShellBasis& shell, const ShellLoad& g, double t);

struct MomentumState {
  Eigen::VectorXd alpha;  // velocity coefficients; shell slots hold ∂_tη
  Eigen::VectorXd c;      // shell displacement coefficients
};

struct StepEnergy {
  double kinetic0 = 0.0, kinetic1 = 0.0;  // ½∫(ρ+κ)|u|²
  double shell_kinetic0 = 0.0, shell_kinetic1 = 0.0;
  double elastic0 = 0.0, elastic1 = 0.0;
  double dissipation = 0.0;
  double force_work = 0.0;
  double pressure_work = 0.0;  // dt ∫p div u_m

  /// (E₁ − E₀) + dissipation − force work − pressure work over the step, mechanical part.
  double residual() const;
};

struct MomentumStepResult {
  MomentumState state;
  StepEnergy energy;
};

class MomentumSolver {
 public:
  MomentumSolver(const GalerkinSpace& space, ShellParams shell, FluidParams fluid,
                 bool shell_only = false);

  const FluidParams& fluid() const { return fluid_; }
  const ShellParams& shell_params() const { return shell_; }
  const Eigen::MatrixXd& shell_stiffness() const { return S_; }
  bool shell_only() const { return shell_only_; }

  /// One step of (𝒜α)' − ½𝒜'α + Rα + E_Y S c = P + F, η' = E_Yᵀα, with the midpoint rule;
  /// 𝒜 is taken at both ends of the step and everything else at the midpoint.
  MomentumStepResult step(const MomentumState& s0, const Eigen::MatrixXd& A0,
                          const Eigen::MatrixXd& A1, const MomentumOperators& ops, double dt) const;

 private:
  const GalerkinSpace* space_;
  ShellParams shell_;
  FluidParams fluid_;
  bool shell_only_;
  Eigen::MatrixXd S_;
  Eigen::MatrixXd EY_;
};

/// Velocity coefficients from nodal values: shell slots carry η̇, the remaining slots come
/// from the (ρ+κ)-weighted projection of u minus the lifted part.
Eigen::VectorXd project_velocity(const GalerkinSpace& space, const Frame& f,
                                 const Eigen::VectorXd& rho_nodal, double kappa,
                                 const Eigen::VectorXd& eta_dot, const Eigen::VectorXd& ux,
                                 const Eigen::VectorXd& uy);

/// L²(∂Ω) norm of u∘Ψ − ∂_tη ν (with ∂_tη = 0 on Γ).
double trace_residual(const GalerkinSpace& space, const Eigen::VectorXd& alpha,
                      const Eigen::VectorXd& eta_dot);

/// Same mismatch for a field u∘Ψ given on the reference domain.
double trace_residual(const GalerkinSpace& space, const std::function<Vec2(const Vec2&)>& u_ref,
                      const Eigen::VectorXd& eta_dot);

}  // namespace kfsi
