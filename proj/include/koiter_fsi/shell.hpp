#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "koiter_fsi/geometry.hpp"

namespace kfsi {

/// Linear shell law K'(η) = m ∂⁴η − b2 ∂²η + b0 η. Inertia is normalized to one.
struct ShellParams {
  double m = 1.0;
  double b2 = 0.0;
  double b0 = 0.0;

  void validate() const;
};

/// L²-orthonormal clamped-beam modes on an interval of length `length`.
class ShellBasis {
 public:
  ShellBasis(int n_modes, double length);

  int size() const { return static_cast<int>(beta_.size()); }
  double length() const { return length_; }
  double wavenumber(int k) const { return beta_[k]; }
  /// Eigenvalue λ_k = β_k⁴ of ∂⁴ with clamped ends.
  double eigenvalue(int k) const;

  /// d^order/da^order of mode k at arc coordinate a; zero outside [0, length].
  double value(int k, double a, int order = 0) const;
  Eigen::VectorXd values(double a, int order = 0) const;

  const Eigen::MatrixXd& mass_gram() const { return mass_; }
  const Eigen::MatrixXd& slope_gram() const { return slope_; }
  const Eigen::MatrixXd& curvature_gram() const { return curvature_; }
  const Rule1D& rule() const { return rule_; }

  Eigen::MatrixXd stiffness(const ShellParams& p) const;

  /// Coefficients of the L² projection of f onto the span of the modes.
  Eigen::VectorXd project(const std::function<double(double)>& f) const;
  double evaluate(const Eigen::VectorXd& coeffs, double a, int order = 0) const;

 private:
  double length_;
  std::vector<double> beta_;
  std::vector<double> sigma_;
  std::vector<double> norm_;
  Rule1D rule_;
  Eigen::MatrixXd mass_;
  Eigen::MatrixXd slope_;
  Eigen::MatrixXd curvature_;
};

/// Roots of cos x cosh x = 1 (clamped–clamped beam), ascending, first n.
std::vector<double> clamped_beam_roots(int n);

ShellBasis shell_eigenbasis(int n_modes, double length);

/// Shell displacement and velocity in the clamped modal basis.
struct DisplacementState {
  Eigen::VectorXd eta;
  Eigen::VectorXd eta_dot;
};

/// Coefficients of K'(η) in the same orthonormal basis (linear in η).
Eigen::VectorXd koiter_gradient(const Eigen::VectorXd& eta, const ShellBasis& basis,
                                const ShellParams& p);

/// K(η) = ½ ⟨K'(η), η⟩.
double koiter_energy(const Eigen::VectorXd& eta, const ShellBasis& basis, const ShellParams& p);

/// Ray displacement on the reference disk for modal coefficients on the upper arc M.
/// `rates` gives ∂_t of the coefficients (may be empty for a static displacement).
RayDisplacement modal_ray_displacement(const ShellBasis& basis, const ReferenceDomain& ref,
                                       Eigen::VectorXd coeffs, Eigen::VectorXd rates = {});

/// sup_M |Σ c_k w_k| on a dense sample.
double modal_sup(const ShellBasis& basis, const Eigen::VectorXd& coeffs, int samples = 400);

}  // namespace kfsi
