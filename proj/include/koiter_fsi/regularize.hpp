#pragma once

#include <Eigen/Dense>

#include <vector>

namespace kfsi {

/// Polynomial bump c(1 − x²)⁴ on (−1, 1) with unit mass.
double bump(double x);
double bump_derivative(double x);

struct MollifierConfig {
  double kappa = 1e-3;
  double horizon = 1.0;     // T
  double arc_length = 2.0;  // length of the closed boundary curve
};

/// One-sided time kernels τ^±, the blend ψ and the arc-length kernel φ_κ.
class Mollifier {
 public:
  explicit Mollifier(const MollifierConfig& cfg);

  const MollifierConfig& config() const { return cfg_; }

  /// τ⁻ is supported in (−κ, 0), τ⁺ in (0, κ).
  double tau_minus(double t) const;
  double tau_plus(double t) const;
  double tau_minus_derivative(double t) const;
  double tau_plus_derivative(double t) const;
  /// Monotone C^∞ ramp: 0 on [0, T/4], 1 on [3T/4, T].
  double psi(double t) const;
  double psi_derivative(double t) const;
  double space_kernel(double x) const;

 private:
  MollifierConfig cfg_;
};

/// Samples of a boundary function on a uniform grid: rows are times t_i = i·T/(nt−1),
/// columns are periodic arc positions a_j = j·ℓ/ns.
using BoundaryTrajectory = Eigen::MatrixXd;

/// 𝓡_κζ on the same grid. Grid weights come from integrating the kernels against
/// piecewise-linear hats, so they are nonnegative and sum to one.
BoundaryTrajectory mollify_displacement(const BoundaryTrajectory& zeta, const MollifierConfig& cfg);

/// ∂_t 𝓡_κζ on the same grid (includes the ψ' blend term).
BoundaryTrajectory mollify_displacement_rate(const BoundaryTrajectory& zeta,
                                             const MollifierConfig& cfg);

/// Space-time field sampled on a uniform tensor grid (t, x, y), flattened as
/// index = (i·nx + j)·ny + k.
struct SpaceTimeGrid {
  int nt = 0;
  int nx = 0;
  int ny = 0;
  double dt = 1.0;
  double dx = 1.0;
  double dy = 1.0;
  std::vector<double> values;

  double& at(int i, int j, int k) { return values[(static_cast<std::size_t>(i) * nx + j) * ny + k]; }
  double at(int i, int j, int k) const { return values[(static_cast<std::size_t>(i) * nx + j) * ny + k]; }
};

/// 𝓡_κ v = ψ_κ ∗ (χ v) with an even, normalized product kernel and zero extension.
SpaceTimeGrid mollify_field(const SpaceTimeGrid& v, const SpaceTimeGrid& chi, double kappa);

/// Σ χ u v dt dx dy on the grid.
double grid_pairing(const SpaceTimeGrid& u, const SpaceTimeGrid& v, const SpaceTimeGrid& chi);

/// Symmetric discrete time convolution with step dt and radius κ on n samples, zero
/// extension at the ends; identity when κ < dt.
Eigen::MatrixXd time_convolution_matrix(int n, double dt, double kappa);

}  // namespace kfsi
