#include "koiter_fsi/basis.hpp"

#include <cmath>
#include <numbers>

#include "koiter_fsi/error.hpp"
#include "koiter_fsi/quadrature.hpp"

namespace kfsi {

namespace {

void legendre_all(int n, double x, std::vector<double>& p, std::vector<double>& dp) {
  p.assign(n + 1, 0.0);
  dp.assign(n + 1, 0.0);
  p[0] = 1.0;
  if (n >= 1) {
    p[1] = x;
    dp[1] = 1.0;
  }
  for (int k = 2; k <= n; ++k) {
    p[k] = ((2.0 * k - 1.0) * x * p[k - 1] - (k - 1.0) * p[k - 2]) / k;
    dp[k] = dp[k - 2] + (2.0 * k - 1.0) * p[k - 1];
  }
}

std::vector<std::pair<int, int>> total_degree(int degree) {
  std::vector<std::pair<int, int>> idx;
  for (int d = 0; d <= degree; ++d)
    for (int i = d; i >= 0; --i) idx.emplace_back(i, d - i);
  return idx;
}

}  // namespace

DensityBasis::DensityBasis(int degree, double radius)
    : degree_(degree), R_(radius), idx_(total_degree(degree)) {}

void DensityBasis::eval(const Vec2& y, Eigen::Ref<Eigen::VectorXd> v, Eigen::Ref<Eigen::VectorXd> gx,
                        Eigen::Ref<Eigen::VectorXd> gy) const {
  std::vector<double> px, dpx, py, dpy;
  legendre_all(degree_, y.x() / R_, px, dpx);
  legendre_all(degree_, y.y() / R_, py, dpy);
  for (int k = 0; k < size(); ++k) {
    const auto [i, j] = idx_[k];
    v[k] = px[i] * py[j];
    gx[k] = dpx[i] * py[j] / R_;
    gy[k] = px[i] * dpy[j] / R_;
  }
}

ScalarTable DensityBasis::table(const std::vector<Vec2>& pts) const {
  const int n = static_cast<int>(pts.size());
  ScalarTable t;
  t.val.resize(n, size());
  t.gx.resize(n, size());
  t.gy.resize(n, size());
  Eigen::VectorXd v(size()), gx(size()), gy(size());
  for (int q = 0; q < n; ++q) {
    eval(pts[q], v, gx, gy);
    t.val.row(q) = v.transpose();
    t.gx.row(q) = gx.transpose();
    t.gy.row(q) = gy.transpose();
  }
  return t;
}

HarmonicLift::HarmonicLift(const ShellBasis& shell, const ReferenceDomain& ref, int terms)
    : shell_(&shell), ref_(&ref) {
  const double pi = std::numbers::pi;
  double rmax = 0.0;
  for (const auto& n : ref.interior()) rmax = std::max(rmax, n.r / ref.radius());
  if (terms <= 0)
    terms = std::max(256, static_cast<int>(std::ceil(std::log(1e-8) / std::log(rmax))));
  // The datum lives on the upper arc; one Gauss cell per term resolves eⁱⁿᶿ.
  const Rule1D rule = composite_gauss(0.0, pi, terms, 8);
  coef_.resize(shell.size());
  for (int k = 0; k < shell.size(); ++k) {
    for (int c = 0; c < 2; ++c) coef_[k][c].assign(terms + 1, {0.0, 0.0});
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double phi = rule.x[q];
      const double w = shell.value(k, ref.shell_coordinate(phi));
      const double g[2] = {w * std::cos(phi), w * std::sin(phi)};
      const std::complex<double> step = std::polar(1.0, -phi);
      std::complex<double> e(1.0, 0.0);
      for (int n = 0; n <= terms; ++n) {
        const double scale = (n == 0 ? 0.5 : 1.0) / pi * rule.w[q];
        coef_[k][0][n] += scale * g[0] * e;
        coef_[k][1][n] += scale * g[1] * e;
        e *= step;
      }
    }
  }
  for (int k = 0; k < shell.size(); ++k)
    for (int c = 0; c < 2; ++c) {
      const double cn = std::abs(coef_[k][c][terms]);
      const double tail = cn * terms * std::pow(rmax, terms - 1) / ((1.0 - rmax) * (1.0 - rmax));
      tail_ = std::max(tail_, tail);
    }
  if (!(tail_ < 1e-8))
    throw Error(ErrorKind::LiftSolveFailure, "harmonic lift series not converged at the outer nodes");
}

Vec2 HarmonicLift::boundary_value(int k, double theta) const {
  if (!ref_->on_shell(theta)) return Vec2::Zero();
  const double w = shell_->value(k, ref_->shell_coordinate(theta));
  return {w * std::cos(theta), w * std::sin(theta)};
}

void HarmonicLift::eval(int k, const Vec2& y, Vec2& value, Mat2& grad) const {
  const double R = ref_->radius();
  const std::complex<double> z(y.x() / R, y.y() / R);
  for (int c = 0; c < 2; ++c) {
    const auto& a = coef_[k][c];
    std::complex<double> f(0.0, 0.0), fp(0.0, 0.0);
    for (int n = static_cast<int>(a.size()) - 1; n >= 0; --n) {
      fp = fp * z + f;
      f = f * z + a[n];
    }
    value[c] = f.real();
    grad(c, 0) = fp.real() / R;
    grad(c, 1) = -fp.imag() / R;
  }
  if (std::abs(z) >= 1.0 - 1e-12) {
    const double theta = std::atan2(y.y(), y.x());
    value = boundary_value(k, theta);
  }
}

VelocityBasis::VelocityBasis(int degree, const ShellBasis& shell, const ReferenceDomain& ref,
                             int lift_terms)
    : degree_(degree),
      R_(ref.radius()),
      shell_(&shell),
      lift_(shell, ref, lift_terms),
      scalar_idx_(total_degree(degree)) {
  const int nx = 2 * static_cast<int>(scalar_idx_.size());
  const int ny = shell.size();
  int ix = 0, iy = 0;
  while (ix < nx || iy < ny) {
    if (ix < nx) kind_.push_back(ix++);
    if (iy < ny) {
      shell_slot_.push_back(static_cast<int>(kind_.size()));
      kind_.push_back(-(iy++) - 1);
    }
  }
  embed_ = Eigen::MatrixXd::Zero(size(), ny);
  for (int j = 0; j < ny; ++j) embed_(shell_slot_[j], j) = 1.0;
}

void VelocityBasis::eval(int k, const Vec2& y, Vec2& value, Mat2& grad) const {
  if (is_shell(k)) {
    lift_.eval(shell_index(k), y, value, grad);
    return;
  }
  const int m = kind_[k] / 2;
  const int c = kind_[k] % 2;
  std::vector<double> px, dpx, py, dpy;
  legendre_all(degree_, y.x() / R_, px, dpx);
  legendre_all(degree_, y.y() / R_, py, dpy);
  const auto [i, j] = scalar_idx_[m];
  const double b = 1.0 - y.squaredNorm() / (R_ * R_);
  const double p = px[i] * py[j];
  const double q = b * p;
  const double qx = -2.0 * y.x() / (R_ * R_) * p + b * dpx[i] * py[j] / R_;
  const double qy = -2.0 * y.y() / (R_ * R_) * p + b * px[i] * dpy[j] / R_;
  value.setZero();
  grad.setZero();
  value[c] = q;
  grad(c, 0) = qx;
  grad(c, 1) = qy;
}

VectorTable VelocityBasis::table(const std::vector<Vec2>& pts) const {
  const int n = static_cast<int>(pts.size());
  const int N = size();
  VectorTable t;
  for (auto* m : {&t.ux, &t.uy, &t.dxx, &t.dxy, &t.dyx, &t.dyy}) m->resize(n, N);
  Vec2 v;
  Mat2 g;
  for (int q = 0; q < n; ++q)
    for (int k = 0; k < N; ++k) {
      eval(k, pts[q], v, g);
      t.ux(q, k) = v[0];
      t.uy(q, k) = v[1];
      t.dxx(q, k) = g(0, 0);
      t.dxy(q, k) = g(0, 1);
      t.dyx(q, k) = g(1, 0);
      t.dyy(q, k) = g(1, 1);
    }
  return t;
}

void VelocityBasis::boundary_values(const ReferenceDomain& ref, Eigen::MatrixXd& ux,
                                    Eigen::MatrixXd& uy) const {
  const int n = static_cast<int>(ref.boundary().size());
  ux = Eigen::MatrixXd::Zero(n, size());
  uy = Eigen::MatrixXd::Zero(n, size());
  for (int q = 0; q < n; ++q)
    for (int k = 0; k < size(); ++k) {
      if (!is_shell(k)) continue;
      const Vec2 v = lift_.boundary_value(shell_index(k), ref.boundary()[q].theta);
      ux(q, k) = v[0];
      uy(q, k) = v[1];
    }
}

std::vector<Vec2> interior_points(const ReferenceDomain& ref) {
  std::vector<Vec2> pts;
  pts.reserve(ref.interior().size());
  for (const auto& n : ref.interior()) pts.push_back(n.x);
  return pts;
}

FrameGeometry frame_geometry(const DomainChart& chart) {
  const auto& ref = chart.reference();
  const auto& nodes = ref.interior();
  const int n = static_cast<int>(nodes.size());
  FrameGeometry g;
  for (auto* v : {&g.W, &g.a00, &g.a01, &g.a10, &g.a11, &g.Vx, &g.Vy}) v->resize(n);
  g.y.resize(n);
  std::vector<RayValues> rays;
  rays.reserve(ref.angles().size());
  for (double th : ref.angles()) rays.push_back(chart.ray(th));
  g.min_J = 1e300;
  for (int q = 0; q < n; ++q) {
    const auto& nd = nodes[q];
    const ChartPoint cp = chart.evaluate(nd.r, nd.theta, rays[nd.angle_index]);
    g.W[q] = nd.weight * cp.J;
    g.a00[q] = cp.DinvT(0, 0);
    g.a01[q] = cp.DinvT(0, 1);
    g.a10[q] = cp.DinvT(1, 0);
    g.a11[q] = cp.DinvT(1, 1);
    g.Vx[q] = cp.V.x();
    g.Vy[q] = cp.V.y();
    g.y[q] = cp.identity ? nd.x : cp.y;
    g.min_J = std::min(g.min_J, cp.J);
  }
  return g;
}

ScalarTable push_forward(const ScalarTable& r, const FrameGeometry& g) {
  ScalarTable t;
  t.val = r.val;
  t.gx = g.a00.asDiagonal() * r.gx + g.a01.asDiagonal() * r.gy;
  t.gy = g.a10.asDiagonal() * r.gx + g.a11.asDiagonal() * r.gy;
  return t;
}

VectorTable push_forward(const VectorTable& r, const FrameGeometry& g) {
  VectorTable t;
  t.ux = r.ux;
  t.uy = r.uy;
  t.dxx = g.a00.asDiagonal() * r.dxx + g.a01.asDiagonal() * r.dxy;
  t.dxy = g.a10.asDiagonal() * r.dxx + g.a11.asDiagonal() * r.dxy;
  t.dyx = g.a00.asDiagonal() * r.dyx + g.a01.asDiagonal() * r.dyy;
  t.dyy = g.a10.asDiagonal() * r.dyx + g.a11.asDiagonal() * r.dyy;
  return t;
}

}  // namespace kfsi
