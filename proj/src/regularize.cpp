#include "koiter_fsi/regularize.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "koiter_fsi/error.hpp"
#include "koiter_fsi/quadrature.hpp"

namespace kfsi {

namespace {

constexpr double kBumpMass = 256.0 / 315.0;

double ramp_f(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }
double ramp_fp(double u) { return u > 0.0 ? std::exp(-1.0 / u) / (u * u) : 0.0; }

// ∫ k(t_out − s) ζ_h(s) ds over [lo, hi] ∩ [0, T] for a kernel supported in
// t_out − s ∈ (k_lo, k_hi); returns the hat weights of the time nodes.
void hat_weights(const std::function<double(double)>& kernel, double t_out, double k_lo,
                 double k_hi, double h, int n, std::vector<std::pair<int, double>>& out) {
  static const Rule1D g = gauss_legendre(6);
  out.clear();
  const double s_lo = std::max(0.0, t_out - k_hi);
  const double s_hi = std::min(h * (n - 1), t_out - k_lo);
  if (!(s_hi > s_lo)) return;
  const int j0 = std::max(0, static_cast<int>(std::floor(s_lo / h)));
  const int j1 = std::min(n - 1, static_cast<int>(std::ceil(s_hi / h)));
  std::vector<double> w(n, 0.0);
  for (int j = j0; j < j1; ++j) {
    const double a = std::max(s_lo, j * h);
    const double b = std::min(s_hi, (j + 1) * h);
    if (!(b > a)) continue;
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (std::size_t q = 0; q < g.size(); ++q) {
      const double s = mid + half * g.x[q];
      const double kv = kernel(t_out - s) * half * g.w[q];
      const double lam = (s - j * h) / h;
      w[j] += kv * (1.0 - lam);
      w[j + 1] += kv * lam;
    }
  }
  for (int j = j0; j <= j1; ++j)
    if (w[j] != 0.0) out.emplace_back(j, w[j]);
}

Eigen::MatrixXd spatial_smooth(const BoundaryTrajectory& zeta, const Mollifier& m) {
  const int ns = static_cast<int>(zeta.cols());
  const double ell = m.config().arc_length;
  const double h = ell / ns;
  const double kappa = m.config().kappa;
  const int D = static_cast<int>(std::ceil(kappa / h)) + 1;
  static const Rule1D g = gauss_legendre(6);
  std::vector<double> w(2 * D + 1, 0.0);
  for (int d = -D; d <= D; ++d) {
    double s = 0.0;
    for (int side = 0; side < 2; ++side) {
      const double a = side == 0 ? -h : 0.0;
      const double b = side == 0 ? 0.0 : h;
      // Split at the kernel support ends so the quadrature sees a polynomial.
      std::vector<double> cuts = {a, b};
      for (double e : {-kappa - d * h, kappa - d * h})
        if (e > a && e < b) cuts.push_back(e);
      std::sort(cuts.begin(), cuts.end());
      for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double half = 0.5 * (cuts[c + 1] - cuts[c]);
        const double mid = 0.5 * (cuts[c + 1] + cuts[c]);
        for (std::size_t q = 0; q < g.size(); ++q) {
          const double u = mid + half * g.x[q];
          s += half * g.w[q] * m.space_kernel(d * h + u) * (1.0 - std::abs(u) / h);
        }
      }
    }
    w[d + D] = s;
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(zeta.rows(), ns);
  for (int j = 0; j < ns; ++j)
    for (int d = -D; d <= D; ++d) {
      if (w[d + D] == 0.0) continue;
      const int src = ((j - d) % ns + ns) % ns;
      out.col(j) += w[d + D] * zeta.col(src);
    }
  return out;
}

BoundaryTrajectory time_blend(const Eigen::MatrixXd& smooth, const Mollifier& m, bool rate) {
  const int nt = static_cast<int>(smooth.rows());
  const double T = m.config().horizon;
  const double h = T / (nt - 1);
  const double kappa = m.config().kappa;
  BoundaryTrajectory out = Eigen::MatrixXd::Zero(nt, smooth.cols());
  std::vector<std::pair<int, double>> wm, wp;
  auto km = [&](double x) { return rate ? m.tau_minus_derivative(x) : m.tau_minus(x); };
  auto kp = [&](double x) { return rate ? m.tau_plus_derivative(x) : m.tau_plus(x); };
  auto k0m = [&](double x) { return m.tau_minus(x); };
  auto k0p = [&](double x) { return m.tau_plus(x); };
  for (int i = 0; i < nt; ++i) {
    const double t = i * h;
    const double ps = m.psi(t);
    Eigen::RowVectorXd minus = Eigen::RowVectorXd::Zero(smooth.cols());
    Eigen::RowVectorXd plus = Eigen::RowVectorXd::Zero(smooth.cols());
    if (ps < 1.0) {
      hat_weights(km, t, -kappa, 0.0, h, nt, wm);
      for (auto [j, w] : wm) minus += w * smooth.row(j);
    }
    if (ps > 0.0) {
      hat_weights(kp, t, 0.0, kappa, h, nt, wp);
      for (auto [j, w] : wp) plus += w * smooth.row(j);
    }
    out.row(i) = ps * plus + (1.0 - ps) * minus;
    if (rate) {
      const double dps = m.psi_derivative(t);
      if (dps != 0.0) {
        Eigen::RowVectorXd a = Eigen::RowVectorXd::Zero(smooth.cols());
        Eigen::RowVectorXd b = Eigen::RowVectorXd::Zero(smooth.cols());
        hat_weights(k0p, t, 0.0, kappa, h, nt, wp);
        for (auto [j, w] : wp) a += w * smooth.row(j);
        hat_weights(k0m, t, -kappa, 0.0, h, nt, wm);
        for (auto [j, w] : wm) b += w * smooth.row(j);
        out.row(i) += dps * (a - b);
      }
    }
  }
  return out;
}

std::vector<double> discrete_kernel(double h, double kappa) {
  const int D = static_cast<int>(std::ceil(kappa / h));
  std::vector<double> k(2 * D + 1, 0.0);
  double s = 0.0;
  for (int d = -D; d <= D; ++d) {
    k[d + D] = bump(d * h / kappa);
    s += k[d + D];
  }
  for (double& v : k) v /= s;
  return k;
}

}  // namespace

double bump(double x) {
  if (std::abs(x) >= 1.0) return 0.0;
  const double y = 1.0 - x * x;
  return y * y * y * y / kBumpMass;
}

double bump_derivative(double x) {
  if (std::abs(x) >= 1.0) return 0.0;
  const double y = 1.0 - x * x;
  return -8.0 * x * y * y * y / kBumpMass;
}

Mollifier::Mollifier(const MollifierConfig& cfg) : cfg_(cfg) {
  if (!(cfg.kappa > 0.0)) throw Error(ErrorKind::ValidationError, "kappa positive");
  if (cfg.kappa > cfg.horizon / 4.0)
    throw Error(ErrorKind::KappaTooLarge, "kappa exceeds T/4");
  if (cfg.kappa > cfg.arc_length / 4.0)
    throw Error(ErrorKind::KappaTooLarge, "kappa exceeds a quarter of the arc length");
}

double Mollifier::tau_minus(double t) const {
  const double r = 0.5 * cfg_.kappa;
  return bump((t + r) / r) / r;
}

double Mollifier::tau_plus(double t) const {
  const double r = 0.5 * cfg_.kappa;
  return bump((t - r) / r) / r;
}

double Mollifier::tau_minus_derivative(double t) const {
  const double r = 0.5 * cfg_.kappa;
  return bump_derivative((t + r) / r) / (r * r);
}

double Mollifier::tau_plus_derivative(double t) const {
  const double r = 0.5 * cfg_.kappa;
  return bump_derivative((t - r) / r) / (r * r);
}

double Mollifier::psi(double t) const {
  const double u = (t - 0.25 * cfg_.horizon) / (0.5 * cfg_.horizon);
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return ramp_f(u) / (ramp_f(u) + ramp_f(1.0 - u));
}

double Mollifier::psi_derivative(double t) const {
  const double u = (t - 0.25 * cfg_.horizon) / (0.5 * cfg_.horizon);
  if (u <= 0.0 || u >= 1.0) return 0.0;
  const double f = ramp_f(u);
  const double g = ramp_f(1.0 - u);
  const double dh = (ramp_fp(u) * g + f * ramp_fp(1.0 - u)) / ((f + g) * (f + g));
  return dh / (0.5 * cfg_.horizon);
}

double Mollifier::space_kernel(double x) const { return bump(x / cfg_.kappa) / cfg_.kappa; }

BoundaryTrajectory mollify_displacement(const BoundaryTrajectory& zeta, const MollifierConfig& cfg) {
  const Mollifier m(cfg);
  return time_blend(spatial_smooth(zeta, m), m, false);
}

BoundaryTrajectory mollify_displacement_rate(const BoundaryTrajectory& zeta,
                                             const MollifierConfig& cfg) {
  const Mollifier m(cfg);
  return time_blend(spatial_smooth(zeta, m), m, true);
}

SpaceTimeGrid mollify_field(const SpaceTimeGrid& v, const SpaceTimeGrid& chi, double kappa) {
  const double T = v.dt * (v.nt - 1);
  const double X = std::min(v.dx * (v.nx - 1), v.dy * (v.ny - 1));
  if (!(kappa > 0.0)) throw Error(ErrorKind::ValidationError, "kappa positive");
  if (kappa > T / 4.0 || kappa > X / 4.0)
    throw Error(ErrorKind::KappaTooLarge, "kappa exceeds a quarter of the grid extent");
  SpaceTimeGrid cur = v;
  for (std::size_t p = 0; p < cur.values.size(); ++p) cur.values[p] *= chi.values[p];
  const std::vector<double> kt = discrete_kernel(v.dt, kappa);
  const std::vector<double> kx = discrete_kernel(v.dx, kappa);
  const std::vector<double> ky = discrete_kernel(v.dy, kappa);
  auto pass = [&](const std::vector<double>& k, int axis) {
    SpaceTimeGrid out = cur;
    std::fill(out.values.begin(), out.values.end(), 0.0);
    const int D = static_cast<int>(k.size() / 2);
    const int n[3] = {cur.nt, cur.nx, cur.ny};
    for (int i = 0; i < cur.nt; ++i)
      for (int j = 0; j < cur.nx; ++j)
        for (int l = 0; l < cur.ny; ++l) {
          int idx[3] = {i, j, l};
          double s = 0.0;
          for (int d = -D; d <= D; ++d) {
            int src[3] = {i, j, l};
            src[axis] = idx[axis] - d;
            if (src[axis] < 0 || src[axis] >= n[axis]) continue;
            s += k[d + D] * cur.at(src[0], src[1], src[2]);
          }
          out.at(i, j, l) = s;
        }
    cur = std::move(out);
  };
  pass(kt, 0);
  pass(kx, 1);
  pass(ky, 2);
  return cur;
}

double grid_pairing(const SpaceTimeGrid& u, const SpaceTimeGrid& v, const SpaceTimeGrid& chi) {
  double s = 0.0;
  for (std::size_t p = 0; p < u.values.size(); ++p) s += chi.values[p] * u.values[p] * v.values[p];
  return s * u.dt * u.dx * u.dy;
}

Eigen::MatrixXd time_convolution_matrix(int n, double dt, double kappa) {
  if (kappa < dt) return Eigen::MatrixXd::Identity(n, n);
  const std::vector<double> k = discrete_kernel(dt, kappa);
  const int D = static_cast<int>(k.size() / 2);
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int d = -D; d <= D; ++d) {
      const int j = i + d;
      if (j >= 0 && j < n) T(i, j) = k[d + D];
    }
  return T;
}

}  // namespace kfsi
