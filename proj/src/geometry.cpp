#include "koiter_fsi/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "koiter_fsi/error.hpp"

namespace kfsi {

namespace {

constexpr double kPi = std::numbers::pi;

Vec2 polar(double r, double theta) { return {r * std::cos(theta), r * std::sin(theta)}; }

double wrap_angle(double theta) {
  double t = std::fmod(theta, 2.0 * kPi);
  if (t < 0.0) t += 2.0 * kPi;
  return t;
}

}  // namespace

double smoothstep5(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

double smoothstep5_derivative(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double y = x * (1.0 - x);
  return 30.0 * y * y;
}

double CutoffProfile::operator()(double s) const { return smoothstep5((s - lo) / (hi - lo)); }

double CutoffProfile::derivative(double s) const {
  return smoothstep5_derivative((s - lo) / (hi - lo)) / (hi - lo);
}

double CutoffProfile::second_derivative(double s) const {
  const double x = (s - lo) / (hi - lo);
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return 60.0 * x * (1.0 - x) * (1.0 - 2.0 * x) / ((hi - lo) * (hi - lo));
}

ReferenceDomain::ReferenceDomain(const DomainOptions& options) : opt_(options) {
  const double R = opt_.radius;
  const double L = opt_.tube_width;
  if (!(R > 0.0) || !(L > 0.0) || L >= R)
    throw Error(ErrorKind::ValidationError, "reference domain needs 0 < L < R");

  std::vector<double> breaks;
  for (int i = 0; i <= opt_.core_cells; ++i) breaks.push_back((R - L) * i / opt_.core_cells);
  for (int i = 1; i <= opt_.layer_cells; ++i) breaks.push_back(R - L + L * i / opt_.layer_cells);
  radial_ = composite_gauss(breaks, opt_.radial_order);
  angular_ = composite_gauss(0.0, 2.0 * kPi, opt_.angular_cells, opt_.angular_order);
  angles_ = angular_.x;

  for (std::size_t j = 0; j < angular_.size(); ++j) {
    for (std::size_t i = 0; i < radial_.size(); ++i) {
      InteriorNode n;
      n.r = radial_.x[i];
      n.theta = angular_.x[j];
      n.weight = radial_.w[i] * n.r * angular_.w[j];
      n.angle_index = static_cast<int>(j);
      n.x = polar(n.r, n.theta);
      interior_.push_back(n);
    }
    BoundaryNode b;
    b.theta = angular_.x[j];
    b.weight = R * angular_.w[j];
    b.angle_index = static_cast<int>(j);
    b.on_shell = on_shell(b.theta);
    b.x = polar(R, b.theta);
    boundary_.push_back(b);
  }
}

Vec2 ReferenceDomain::boundary_point(double theta) const { return polar(opt_.radius, theta); }

Vec2 ReferenceDomain::normal(double theta) const { return {std::cos(theta), std::sin(theta)}; }

bool ReferenceDomain::on_shell(double theta) const {
  if (opt_.shell_covers_boundary) return true;
  const double t = wrap_angle(theta);
  return t <= kPi;
}

double ReferenceDomain::shell_length() const {
  return opt_.shell_covers_boundary ? 2.0 * kPi * opt_.radius : kPi * opt_.radius;
}

double ReferenceDomain::shell_coordinate(double theta) const {
  return opt_.radius * wrap_angle(theta);
}

double ReferenceDomain::angle_of_shell_coordinate(double a) const { return a / opt_.radius; }

double ReferenceDomain::area() const {
  double a = 0.0;
  for (const auto& n : interior_) a += n.weight;
  return a;
}

TubeCoordinates closest_point_decomposition(const Vec2& x, const ReferenceDomain& ref) {
  const double r = x.norm();
  const double s = r - ref.radius();
  if (std::abs(s) >= ref.tube_width())
    throw Error(ErrorKind::OutOfTube, "point is farther than L from the boundary");
  TubeCoordinates tc;
  tc.theta = wrap_angle(std::atan2(x.y(), x.x()));
  tc.q = ref.boundary_point(tc.theta);
  tc.s = s;
  return tc;
}

Vec2 curve_normal(const ParametricCurve& curve, double t) {
  const Vec2 d = curve.derivative(t);
  return Vec2(d.y(), -d.x()).normalized();
}

CurveProjection closest_point_on_curve(const ParametricCurve& curve, const Vec2& x, int samples) {
  double best_t = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double t = curve.period * i / samples;
    const double d = (curve.point(t) - x).squaredNorm();
    if (d < best) {
      best = d;
      best_t = t;
    }
  }
  const double h = curve.period / samples;
  double t = best_t;
  for (int it = 0; it < 50; ++it) {
    const Vec2 p = curve.point(t);
    const Vec2 d1 = curve.derivative(t);
    Vec2 d2;
    if (curve.second_derivative) {
      d2 = curve.second_derivative(t);
    } else {
      const double e = 1e-5 * curve.period;
      d2 = (curve.derivative(t + e) - curve.derivative(t - e)) / (2.0 * e);
    }
    const double f = (p - x).dot(d1);
    double fp = d1.squaredNorm() + (p - x).dot(d2);
    if (fp <= 0.0) fp = d1.squaredNorm();
    double step = f / fp;
    step = std::clamp(step, -h, h);
    t -= step;
    if (std::abs(step) < 1e-14 * curve.period) break;
  }
  CurveProjection out;
  out.parameter = t;
  out.point = curve.point(t);
  out.distance = (out.point - x).norm();
  return out;
}

double tube_injectivity_defect(const ParametricCurve& curve, double width, int n_q, int n_s) {
  double worst = 0.0;
  for (int i = 0; i < n_q; ++i) {
    const double t = curve.period * (i + 0.5) / n_q;
    const Vec2 q = curve.point(t);
    const Vec2 nu = curve_normal(curve, t);
    for (int j = 0; j < n_s; ++j) {
      const double s = 0.98 * width * (2.0 * j / (n_s - 1.0) - 1.0);
      const Vec2 x = q + s * nu;
      const CurveProjection p = closest_point_on_curve(curve, x, 4 * n_q);
      worst = std::max(worst, (p.point - q).norm());
    }
  }
  return worst;
}

RayDisplacement RayDisplacement::zero() { return constant(0.0, 0.0); }

RayDisplacement RayDisplacement::constant(double c, double rate) {
  RayDisplacement d;
  d.value = [c](double) { return c; };
  d.d_theta = [](double) { return 0.0; };
  d.d_t = [rate](double) { return rate; };
  return d;
}

double sampled_sup(const ReferenceDomain& ref, const std::function<double(double)>& f) {
  double m = 0.0;
  for (const auto& b : ref.boundary()) m = std::max(m, std::abs(f(b.theta)));
  constexpr int kDense = 720;
  for (int i = 0; i < kDense; ++i) m = std::max(m, std::abs(f(2.0 * kPi * (i + 0.5) / kDense)));
  return m;
}

DomainChart::DomainChart(const ReferenceDomain& ref, RayDisplacement moving,
                         std::vector<RayDisplacement> frozen)
    : ref_(&ref), moving_(std::move(moving)), frozen_(std::move(frozen)) {
  const double L = ref.tube_width();
  double width = L;
  for (std::size_t k = 0; k <= frozen_.size(); ++k) {
    if (k > 0) {
      width = L - sampled_sup(ref, [this, k](double th) {
                double b = 0.0;
                for (std::size_t j = 0; j < k; ++j) b += frozen_[j].value(th);
                return b;
              });
      if (!(width > 0.0))
        throw Error(ErrorKind::RestartGeometryInvalid, "base displacement leaves no tube");
    }
    profiles_.push_back(CutoffProfile{-width, 0.0});
  }
  moving_width_ = width;
}

RayValues DomainChart::ray(double theta) const {
  RayValues rv;
  rv.z = moving_.value(theta);
  rv.z_theta = moving_.d_theta(theta);
  rv.z_t = moving_.d_t(theta);
  for (const auto& f : frozen_) {
    rv.layer.push_back(f.value(theta));
    rv.layer_theta.push_back(f.d_theta(theta));
    rv.b += rv.layer.back();
    rv.b_theta += rv.layer_theta.back();
  }
  return rv;
}

double DomainChart::total_displacement(double theta) const {
  double v = moving_.value(theta);
  for (const auto& f : frozen_) v += f.value(theta);
  return v;
}

double DomainChart::radial_map(double s, const RayValues& rv, double* S_s, double* S_theta,
                               double* S_t) const {
  double S = s, Ss = 1.0, Sth = 0.0, B = 0.0, Bth = 0.0;
  auto layer = [&](const CutoffProfile& p, double d, double d_th) {
    const double u = S - B;
    const double ph = p(u);
    const double phd = p.derivative(u);
    Sth = Sth + d_th * ph + d * phd * (Sth - Bth);
    Ss *= 1.0 + d * phd;
    S += d * ph;
    B += d;
    Bth += d_th;
    return ph;
  };
  for (std::size_t k = 0; k < rv.layer.size(); ++k) layer(profiles_[k], rv.layer[k], rv.layer_theta[k]);
  const double pm = layer(profiles_.back(), rv.z, rv.z_theta);
  if (S_s) *S_s = Ss;
  if (S_theta) *S_theta = Sth;
  if (S_t) *S_t = rv.z_t * pm;
  return S;
}

ChartPoint DomainChart::evaluate(double r, double theta, const RayValues& rv) const {
  const double R = ref_->radius();
  const double s = r - R;
  ChartPoint cp;
  if (s <= -ref_->tube_width()) {
    cp.y = polar(r, theta);
    cp.D.setIdentity();
    cp.DinvT.setIdentity();
    cp.J = 1.0;
    cp.V.setZero();
    cp.identity = true;
    return cp;
  }
  double S_s = 0.0, S_th = 0.0, S_t = 0.0;
  const double S = radial_map(s, rv, &S_s, &S_th, &S_t);
  const double rho = R + S;
  const Vec2 er(std::cos(theta), std::sin(theta));
  const Vec2 et(-std::sin(theta), std::cos(theta));
  Mat2 Q;
  Q.col(0) = er;
  Q.col(1) = et;
  Mat2 P;
  P << S_s, S_th / r, 0.0, rho / r;
  cp.y = rho * er;
  cp.D = Q * P * Q.transpose();
  Mat2 Pinv;
  Pinv << 1.0 / S_s, -S_th / (S_s * rho), 0.0, r / rho;
  cp.DinvT = (Q * Pinv * Q.transpose()).transpose();
  cp.J = S_s * rho / r;
  cp.V = S_t * er;
  cp.identity = false;
  return cp;
}

ChartPoint DomainChart::evaluate(const Vec2& x) const {
  const double r = x.norm();
  const double theta = wrap_angle(std::atan2(x.y(), x.x()));
  ChartPoint cp = evaluate(r, theta, ray(theta));
  if (cp.identity) cp.y = x;
  return cp;
}

Vec2 DomainChart::psi(const Vec2& x) const {
  const double r = x.norm();
  if (r - ref_->radius() <= -ref_->tube_width()) return x;
  const double theta = wrap_angle(std::atan2(x.y(), x.x()));
  const RayValues rv = ray(theta);
  const double S = radial_map(r - ref_->radius(), rv, nullptr, nullptr, nullptr);
  return polar(ref_->radius() + S, theta);
}

Vec2 DomainChart::psi_inverse(const Vec2& y) const {
  const double R = ref_->radius();
  const double L = ref_->tube_width();
  const double rho = y.norm();
  const double target = rho - R;
  if (target <= -L) return y;
  const double theta = wrap_angle(std::atan2(y.y(), y.x()));
  const RayValues rv = ray(theta);
  const double eta = rv.b + rv.z;

  double lo = -L;
  double hi = std::max(0.0, target - eta) + 1e-12;
  while (radial_map(hi, rv, nullptr, nullptr, nullptr) < target) hi += L;
  double s = std::clamp(target - eta, lo, hi);
  for (int it = 0; it < 50; ++it) {
    double S_s = 1.0;
    const double F = radial_map(s, rv, &S_s, nullptr, nullptr) - target;
    if (std::abs(F) < 1e-12) break;
    if (F > 0.0) hi = s; else lo = s;
    double next = s - F / S_s;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    s = next;
  }
  return polar(R + s, theta);
}

double DomainChart::jac_det(const Vec2& x) const { return evaluate(x).J; }

Mat2 DomainChart::jacobian(const Vec2& x) const { return evaluate(x).D; }

Vec2 DomainChart::mesh_velocity(const Vec2& x) const { return evaluate(x).V; }

Vec2 DomainChart::boundary_point(double theta) const {
  return polar(ref_->radius() + total_displacement(theta), theta);
}

Vec2 DomainChart::boundary_normal(double theta) const {
  const double rho = ref_->radius() + total_displacement(theta);
  double d = moving_.d_theta(theta);
  for (const auto& f : frozen_) d += f.d_theta(theta);
  const Vec2 er(std::cos(theta), std::sin(theta));
  const Vec2 et(-std::sin(theta), std::cos(theta));
  return (rho * er - d * et).normalized();
}

double DomainChart::sup_displacement() const {
  return sampled_sup(*ref_, [this](double th) { return total_displacement(th); });
}

double DomainChart::min_jacobian() const {
  double m = std::numeric_limits<double>::infinity();
  std::vector<RayValues> rays;
  rays.reserve(ref_->angles().size());
  for (double th : ref_->angles()) rays.push_back(ray(th));
  for (const auto& n : ref_->interior()) m = std::min(m, evaluate(n.r, n.theta, rays[n.angle_index]).J);
  return m;
}

DomainChart build_chart(const ReferenceDomain& ref, RayDisplacement eta,
                        std::vector<RayDisplacement> frozen) {
  DomainChart chart(ref, std::move(eta), std::move(frozen));
  double sup = 0.0;
  for (const auto& b : ref.boundary()) {
    const RayValues rv = chart.ray(b.theta);
    sup = std::max(sup, std::abs(rv.z));
  }
  if (sup >= 0.5 * chart.moving_tube_width())
    throw Error(ErrorKind::DisplacementTooLarge, "displacement reaches half the tube width");
  return chart;
}

std::vector<double> trace(const ScalarField& field, const DomainChart& chart) {
  std::vector<double> out;
  out.reserve(chart.reference().boundary().size());
  for (const auto& b : chart.reference().boundary()) out.push_back(field(chart.boundary_point(b.theta)));
  return out;
}

FieldExtension::FieldExtension(ScalarField field, const DomainChart& chart)
    : field_(std::move(field)), chart_(&chart) {
  lambda_[0] = 1.0;
  lambda_[1] = 0.5;
  lambda_[2] = 0.25;
  Eigen::Matrix3d A;
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i) A(k, i) = std::pow(-lambda_[i], k);
  const Eigen::Vector3d c = A.lu().solve(Eigen::Vector3d::Ones());
  for (int i = 0; i < 3; ++i) c_[i] = c[i];
}

double FieldExtension::operator()(const Vec2& x) const {
  const double R = chart_->reference().radius();
  const double L = chart_->reference().tube_width();
  const double rho = x.norm();
  const double theta = wrap_angle(std::atan2(x.y(), x.x()));
  const double boundary = R + chart_->total_displacement(theta);
  if (rho <= boundary) return field_(x);
  const Vec2 y = chart_->psi_inverse(x);
  const double d = y.norm() - R;
  if (d >= 0.75 * L) return 0.0;
  const double chi = 1.0 - smoothstep5((d - 0.5 * L) / (0.25 * L));
  double v = 0.0;
  for (int i = 0; i < 3; ++i) v += c_[i] * field_(chart_->psi(polar(R - lambda_[i] * d, theta)));
  return chi * v;
}

double integrate_moving(const ScalarField& g, const DomainChart& chart) {
  const auto& ref = chart.reference();
  std::vector<RayValues> rays;
  for (double th : ref.angles()) rays.push_back(chart.ray(th));
  double sum = 0.0;
  for (const auto& n : ref.interior()) {
    ChartPoint cp = chart.evaluate(n.r, n.theta, rays[n.angle_index]);
    if (cp.identity) cp.y = n.x;
    sum += n.weight * cp.J * g(cp.y);
  }
  return sum;
}

ReynoldsTerms reynolds_residual(const SpaceTimeField& g, const DisplacementTrajectory& eta,
                                const ReferenceDomain& ref, double t, double h) {
  const DomainChart cm(ref, eta(t - h));
  const DomainChart c0(ref, eta(t));
  const DomainChart cp(ref, eta(t + h));
  ReynoldsTerms out;
  const double Im = integrate_moving([&](const Vec2& y) { return g(t - h, y); }, cm);
  const double Ip = integrate_moving([&](const Vec2& y) { return g(t + h, y); }, cp);
  out.d_dt_volume = (Ip - Im) / (2.0 * h);
  out.volume_rate = integrate_moving(
      [&](const Vec2& y) { return (g(t + h, y) - g(t - h, y)) / (2.0 * h); }, c0);
  const RayDisplacement e = eta(t);
  const double R = ref.radius();
  for (const auto& b : ref.boundary()) {
    const double dtheta = b.weight / R;
    const double z = e.value(b.theta);
    out.boundary_flux += dtheta * e.d_t(b.theta) * g(t, c0.boundary_point(b.theta)) * (R + z);
  }
  out.residual = std::abs(out.d_dt_volume - out.volume_rate - out.boundary_flux);
  return out;
}

}  // namespace kfsi
