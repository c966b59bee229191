#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "koiter_fsi/geometry.hpp"

namespace kfsi {

/// Physical basis data at the quadrature nodes of one time level.
struct ScalarFrame {
  Eigen::VectorXd W;            // weight × Jacobian
  Eigen::MatrixXd phi, gx, gy;  // values and gradients of ω_k
  Eigen::VectorXd wx, wy;       // drift w
  Eigen::VectorXd Vx, Vy;       // mesh velocity ∂_tΨ
  Eigen::VectorXd divw;         // div w (used by diagnostics)
  Eigen::VectorXd px, py;       // physical node positions
  Eigen::MatrixXd sample;       // extra sample rows for the sign check (may be empty)
};

struct TransportMatrices {
  Eigen::MatrixXd M;  // ∫ω_k ω_l
  Eigen::MatrixXd D;  // ∫ω_k (w − V)·∇ω_l  (row l, column k)
  Eigen::MatrixXd K;  // ∫∇ω_k·∇ω_l
};

/// Matrices of d/dt(Mβ) = (D − εK)β. Throws SingularMass if cond(M) > 1e12.
TransportMatrices assemble_transport_system(const ScalarFrame& f, bool check_condition = true);

using FrameProvider = std::function<ScalarFrame(double)>;

struct TransportStep {
  Eigen::VectorXd beta;
  double min_density = 0.0;
  double dissipation = 0.0;  // dt·ε∫|∇ρ_m|²
  int substeps = 1;
  bool flagged = false;  // still negative after all halvings
};

class TransportSolver {
 public:
  explicit TransportSolver(double epsilon, double reject_below = -1e-6, int max_halvings = 6);

  double epsilon() const { return eps_; }

  /// L² projection of nodal values onto the basis of a frame.
  Eigen::VectorXd project(const Eigen::VectorXd& nodal_values, const ScalarFrame& f) const;

  /// Implicit midpoint step (M₁ − dt/2·A_m)β₁ = (M₀ + dt/2·A_m)β₀. Steps with a density
  /// below the rejection threshold are repeated with 2, 4, … substeps.
  TransportStep step(const Eigen::VectorXd& beta0, const FrameProvider& frames, double t0,
                     double dt) const;

  /// `steps` implicit midpoint steps on a static frame with preassembled matrices.
  Eigen::VectorXd advance_static(const Eigen::VectorXd& beta0, const TransportMatrices& m, double dt,
                                 int steps) const;

 private:
  Eigen::VectorXd advance(const Eigen::VectorXd& beta0, const ScalarFrame& f0, const ScalarFrame& fm,
                          const ScalarFrame& f1, double dt, double* dissipation) const;

  double eps_;
  double reject_below_;
  int max_halvings_;
};

double total_mass(const Eigen::VectorXd& beta, const ScalarFrame& f);

/// Smallest density over the quadrature nodes and the extra sample rows.
double nonnegativity_check(const Eigen::VectorXd& beta, const ScalarFrame& f);

/// Renormalization function θ with derivatives.
struct Renormalizer {
  std::function<double(double)> theta, d1, d2;

  static Renormalizer identity();
  /// z² up to `knee`, then C² transition to linear growth (θ'' = 0 beyond 2·knee).
  static Renormalizer smoothed_square(double knee);
  /// C¹ convex approximation of the negative part z⁻ with transition width 1/n.
  static Renormalizer negative_part(double n);
};

/// Stored transport run: densities at t_n, with a frame provider for any time.
struct TransportTrajectory {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> beta;
  FrameProvider frames;
  double epsilon = 0.0;
};

struct RenormalizedTerms {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
};

using SpaceTimeTest = std::function<double(double, const Vec2&)>;
using SpaceTimeGradient = std::function<Vec2(double, const Vec2&)>;

/// Both sides of the renormalized continuity identity over the trajectory window for a
/// test function ψ(t, x) given with its gradient and time derivative. Time integrals use
/// the midpoint rule on the stored steps.
RenormalizedTerms renormalized_residual(const TransportTrajectory& traj, const Renormalizer& th,
                                        const SpaceTimeTest& psi, const SpaceTimeGradient& grad_psi,
                                        const SpaceTimeTest& dpsi_dt);

/// Static unit-square fixture: cos(iπx)cos(jπy), i + j ≤ modes − 1, on composite Gauss.
ScalarFrame square_cosine_frame(int modes, int cells, int order);

}  // namespace kfsi
