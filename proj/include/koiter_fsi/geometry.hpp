#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "koiter_fsi/quadrature.hpp"

namespace kfsi {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Smooth ramp φ(s): 0 below `lo`, 1 above `hi`, quintic smoothstep in between.
struct CutoffProfile {
  double lo = -0.5;
  double hi = 0.0;

  double operator()(double s) const;
  double derivative(double s) const;
  double second_derivative(double s) const;
  double max_slope() const { return 1.875 / (hi - lo); }
};

/// Quintic smoothstep x³(10 − 15x + 6x²) clamped to [0, 1].
double smoothstep5(double x);
double smoothstep5_derivative(double x);

struct DomainOptions {
  double radius = 1.0;
  double tube_width = 0.5;
  int core_cells = 2;
  int layer_cells = 3;
  int radial_order = 4;
  int angular_cells = 16;
  int angular_order = 4;
  // Test fixture: the shell covers the whole boundary instead of the upper arc.
  bool shell_covers_boundary = false;
};

struct InteriorNode {
  double r = 0.0;
  double theta = 0.0;
  double weight = 0.0;  // r dr dθ
  int angle_index = 0;
  Vec2 x;
};

struct BoundaryNode {
  double theta = 0.0;
  double weight = 0.0;  // R dθ
  int angle_index = 0;
  bool on_shell = false;
  Vec2 x;
};

/// Reference disk Ω of radius R. The shell arc M is the upper half θ ∈ [0, π] (or all of
/// ∂Ω for the fixture option), Γ the rest.
class ReferenceDomain {
 public:
  explicit ReferenceDomain(const DomainOptions& options = {});

  const DomainOptions& options() const { return opt_; }
  double radius() const { return opt_.radius; }
  double tube_width() const { return opt_.tube_width; }

  Vec2 boundary_point(double theta) const;
  Vec2 normal(double theta) const;
  bool on_shell(double theta) const;
  double shell_length() const;
  /// Arc-length coordinate on M for an angle θ (0 at the start of M).
  double shell_coordinate(double theta) const;
  double angle_of_shell_coordinate(double a) const;

  const std::vector<InteriorNode>& interior() const { return interior_; }
  const std::vector<BoundaryNode>& boundary() const { return boundary_; }
  const std::vector<double>& angles() const { return angles_; }
  const Rule1D& radial_rule() const { return radial_; }

  double area() const;

 private:
  DomainOptions opt_;
  Rule1D radial_;
  Rule1D angular_;
  std::vector<double> angles_;
  std::vector<InteriorNode> interior_;
  std::vector<BoundaryNode> boundary_;
};

struct TubeCoordinates {
  Vec2 q;
  double s = 0.0;
  double theta = 0.0;
};

/// q(x), s(x) for the reference disk. Throws OutOfTube when |s| ≥ L.
TubeCoordinates closest_point_decomposition(const Vec2& x, const ReferenceDomain& ref);

/// Closed parametric curve with period `period` in its parameter.
struct ParametricCurve {
  std::function<Vec2(double)> point;
  std::function<Vec2(double)> derivative;
  std::function<Vec2(double)> second_derivative;
  double period = 2.0 * 3.14159265358979323846;
};

struct CurveProjection {
  double parameter = 0.0;
  Vec2 point;
  double distance = 0.0;
};

/// Closest point on a parametric curve: dense sampling followed by Newton refinement.
CurveProjection closest_point_on_curve(const ParametricCurve& curve, const Vec2& x,
                                       int samples = 512);

/// Unit normal of a counter-clockwise curve (pointing to the right of the tangent).
Vec2 curve_normal(const ParametricCurve& curve, double t);

/// Samples Λ(q, s) = q + s ν(q) on a grid of (q, s) with |s| < width and verifies that the
/// closest point of every sample is its own foot point. Returns the worst foot-point
/// mismatch (0 for an injective tube).
double tube_injectivity_defect(const ParametricCurve& curve, double width, int n_q = 96,
                               int n_s = 9);

/// Displacement along the reference normal as a function of the polar angle.
struct RayDisplacement {
  std::function<double(double)> value;
  std::function<double(double)> d_theta;
  std::function<double(double)> d_t;

  static RayDisplacement zero();
  static RayDisplacement constant(double c, double rate = 0.0);
};

/// Values of the displacement at one angle. After restarts the frozen layers carry the
/// earlier displacements; b is their sum.
struct RayValues {
  double z = 0.0;
  double z_theta = 0.0;
  double z_t = 0.0;
  double b = 0.0;
  double b_theta = 0.0;
  std::vector<double> layer;
  std::vector<double> layer_theta;
};

/// Chart derivatives at one reference point.
struct ChartPoint {
  Vec2 y;       // Ψ(x)
  Mat2 D;       // DΨ(x), Cartesian
  Mat2 DinvT;   // DΨ(x)^{-T}
  double J = 1.0;
  Vec2 V;       // ∂_t Ψ(x)
  bool identity = true;
};

/// Hanzawa-type chart Ψ_η of the reference disk. The displacement acts along the
/// reference normal. Frozen layers b₁, b₂, … (earlier restarts) compose as
/// Ψ = Ψ̃_z ∘ … ∘ Ψ_{b₂} ∘ Ψ_{b₁}, each with a cutoff centred on its displaced boundary and
/// narrowed by the displacement accumulated below it.
class DomainChart {
 public:
  DomainChart(const ReferenceDomain& ref, RayDisplacement moving,
              std::vector<RayDisplacement> frozen = {});

  const ReferenceDomain& reference() const { return *ref_; }
  const CutoffProfile& cutoff() const { return profiles_.front(); }
  const CutoffProfile& moving_cutoff() const { return profiles_.back(); }
  double moving_tube_width() const { return moving_width_; }
  const std::vector<RayDisplacement>& frozen() const { return frozen_; }
  const RayDisplacement& moving() const { return moving_; }

  RayValues ray(double theta) const;
  double total_displacement(double theta) const;

  ChartPoint evaluate(double r, double theta, const RayValues& rv) const;
  ChartPoint evaluate(const Vec2& x) const;

  Vec2 psi(const Vec2& x) const;
  Vec2 psi_inverse(const Vec2& y) const;
  double jac_det(const Vec2& x) const;
  Mat2 jacobian(const Vec2& x) const;
  Vec2 mesh_velocity(const Vec2& x) const;

  /// Physical boundary point Ψ(q(θ)) and its outward unit normal.
  Vec2 boundary_point(double theta) const;
  Vec2 boundary_normal(double theta) const;

  double sup_displacement() const;
  double min_jacobian() const;

 private:
  double radial_map(double s, const RayValues& rv, double* S_s, double* S_theta,
                    double* S_t) const;

  const ReferenceDomain* ref_;
  RayDisplacement moving_;
  std::vector<RayDisplacement> frozen_;
  std::vector<CutoffProfile> profiles_;  // one per frozen layer, then the moving one
  double moving_width_;
};

/// Builds a chart after checking ‖η‖_∞ < L̃/2 on the boundary nodes.
DomainChart build_chart(const ReferenceDomain& ref, RayDisplacement eta,
                        std::vector<RayDisplacement> frozen = {});

/// sup over the boundary nodes and a dense angular sample of |f|.
double sampled_sup(const ReferenceDomain& ref, const std::function<double(double)>& f);

using ScalarField = std::function<double(const Vec2&)>;

/// v ∘ Ψ_η sampled at the boundary quadrature nodes.
std::vector<double> trace(const ScalarField& field, const DomainChart& chart);

/// Extension of a field on Ω_η to ℝ²: identity on Ω_η, reflected across ∂Ω in chart
/// coordinates inside the tube, zero far away.
class FieldExtension {
 public:
  FieldExtension(ScalarField field, const DomainChart& chart);
  double operator()(const Vec2& x) const;

 private:
  ScalarField field_;
  const DomainChart* chart_;
  double c_[3];
  double lambda_[3];
};

using SpaceTimeField = std::function<double(double, const Vec2&)>;
using DisplacementTrajectory = std::function<RayDisplacement(double)>;

struct ReynoldsTerms {
  double d_dt_volume = 0.0;
  double volume_rate = 0.0;
  double boundary_flux = 0.0;
  double residual = 0.0;
};

/// |d/dt ∫_{Ω_η} g − ∫_{Ω_η} ∂_t g − ∫_{∂Ω_η} (∂_tη∘Ψ⁻¹)(ν·ν_η) g| at time t, with central
/// differences of step h for the time derivatives.
ReynoldsTerms reynolds_residual(const SpaceTimeField& g, const DisplacementTrajectory& eta,
                                const ReferenceDomain& ref, double t, double h);

/// ∫_{Ω_η} g by pull-back with the Jacobian weight.
double integrate_moving(const ScalarField& g, const DomainChart& chart);

}  // namespace kfsi
