#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <vector>

#include "koiter_fsi/geometry.hpp"
#include "koiter_fsi/shell.hpp"

namespace kfsi {

/// Scalar basis values and reference gradients at a point set (rows = points).
struct ScalarTable {
  Eigen::MatrixXd val, gx, gy;
};

/// Vector basis values and gradients at a point set. d_cd = ∂_d of component c.
struct VectorTable {
  Eigen::MatrixXd ux, uy;
  Eigen::MatrixXd dxx, dxy, dyx, dyy;
};

/// Tensor Legendre polynomials P_i(x/R)P_j(y/R), i + j ≤ degree. Includes the constant.
class DensityBasis {
 public:
  DensityBasis(int degree, double radius);
  int size() const { return static_cast<int>(idx_.size()); }
  int degree() const { return degree_; }
  void eval(const Vec2& y, Eigen::Ref<Eigen::VectorXd> v, Eigen::Ref<Eigen::VectorXd> gx,
            Eigen::Ref<Eigen::VectorXd> gy) const;
  ScalarTable table(const std::vector<Vec2>& pts) const;

 private:
  int degree_;
  double R_;
  std::vector<std::pair<int, int>> idx_;
};

/// Harmonic extension into the disk of the boundary field w_k(ℓ(θ)) e_r(θ) on M, zero on Γ,
/// as a truncated power series of an analytic function per component.
class HarmonicLift {
 public:
  /// `terms` ≤ 0 picks the series length from the outermost interior node.
  HarmonicLift(const ShellBasis& shell, const ReferenceDomain& ref, int terms = 0);

  int size() const { return static_cast<int>(coef_.size()); }
  /// Value (2) and reference gradient rows (∂x, ∂y) of component c.
  void eval(int k, const Vec2& y, Vec2& value, Mat2& grad) const;
  /// Exact boundary datum at angle θ.
  Vec2 boundary_value(int k, double theta) const;
  /// Largest neglected-tail bound over the interior nodes.
  double tail_bound() const { return tail_; }

 private:
  const ShellBasis* shell_;
  const ReferenceDomain* ref_;
  // coef_[k][c][n]: coefficient of zⁿ of component c.
  std::vector<std::array<std::vector<std::complex<double>>, 2>> coef_;
  double tail_ = 0.0;
};

/// Coupled velocity basis: zero-trace modes X (bubble × Legendre, both components)
/// interleaved with the lifted shell modes Y: X₁, Y₁, X₂, Y₂, …, then the remaining X.
class VelocityBasis {
 public:
  VelocityBasis(int degree, const ShellBasis& shell, const ReferenceDomain& ref,
                int lift_terms = 0);

  int size() const { return static_cast<int>(kind_.size()); }
  int n_shell() const { return shell_->size(); }
  bool is_shell(int k) const { return kind_[k] < 0; }
  int shell_index(int k) const { return is_shell(k) ? -kind_[k] - 1 : -1; }
  /// Slot of shell mode j in the enumeration.
  int slot_of_shell(int j) const { return shell_slot_[j]; }
  /// Embedding of shell coefficients into the velocity slots (size × n_shell).
  const Eigen::MatrixXd& shell_embedding() const { return embed_; }

  void eval(int k, const Vec2& y, Vec2& value, Mat2& grad) const;
  VectorTable table(const std::vector<Vec2>& pts) const;
  /// Values only at boundary nodes; lifted modes use the exact datum.
  void boundary_values(const ReferenceDomain& ref, Eigen::MatrixXd& ux, Eigen::MatrixXd& uy) const;

  const HarmonicLift& lift() const { return lift_; }
  const ShellBasis& shell() const { return *shell_; }

 private:
  int degree_;
  double R_;
  const ShellBasis* shell_;
  HarmonicLift lift_;
  std::vector<std::pair<int, int>> scalar_idx_;
  // kind_ ≥ 0: X mode 2·m + component; kind_ < 0: shell mode −kind_−1.
  std::vector<int> kind_;
  std::vector<int> shell_slot_;
  Eigen::MatrixXd embed_;
};

/// Chart data at the interior nodes for one time level.
struct FrameGeometry {
  Eigen::VectorXd W;  // quadrature weight × J
  Eigen::VectorXd a00, a01, a10, a11;  // DΨ^{-T}
  Eigen::VectorXd Vx, Vy;
  std::vector<Vec2> y;
  double min_J = 1.0;
};

FrameGeometry frame_geometry(const DomainChart& chart);

/// Physical values/gradients of a scalar table under a frame (gradients by DΨ^{-T}).
ScalarTable push_forward(const ScalarTable& ref, const FrameGeometry& g);
VectorTable push_forward(const VectorTable& ref, const FrameGeometry& g);

/// Reference points of the interior nodes.
std::vector<Vec2> interior_points(const ReferenceDomain& ref);

}  // namespace kfsi
