#include "koiter_fsi/shell.hpp"

#include <cmath>
#include <numbers>

#include "koiter_fsi/error.hpp"

namespace kfsi {

void ShellParams::validate() const {
  if (!(m > 0.0)) throw Error(ErrorKind::ValidationError, "shell.m positive");
  if (b2 < 0.0) throw Error(ErrorKind::ValidationError, "shell.b2 nonnegative");
  if (b0 < 0.0) throw Error(ErrorKind::ValidationError, "shell.b0 nonnegative");
}

std::vector<double> clamped_beam_roots(int n) {
  std::vector<double> roots;
  for (int k = 1; k <= n; ++k) {
    double x = (k + 0.5) * std::numbers::pi;
    for (int it = 0; it < 100; ++it) {
      const double f = std::cos(x) - 1.0 / std::cosh(x);
      const double fp = -std::sin(x) + std::tanh(x) / std::cosh(x);
      const double dx = f / fp;
      x -= dx;
      if (std::abs(dx) < 1e-15 * x) break;
    }
    roots.push_back(x);
  }
  return roots;
}

ShellBasis::ShellBasis(int n_modes, double length) : length_(length) {
  if (n_modes < 1) throw Error(ErrorKind::ValidationError, "shell modes >= 1");
  const std::vector<double> roots = clamped_beam_roots(n_modes);
  rule_ = composite_gauss(0.0, length, 64, 8);
  for (double X : roots) {
    beta_.push_back(X / length);
    sigma_.push_back((std::cosh(X) - std::cos(X)) / (std::sinh(X) - std::sin(X)));
    norm_.push_back(1.0);
  }
  for (int k = 0; k < n_modes; ++k) {
    double s = 0.0;
    for (std::size_t q = 0; q < rule_.size(); ++q) {
      const double v = value(k, rule_.x[q]);
      s += rule_.w[q] * v * v;
    }
    norm_[k] = 1.0 / std::sqrt(s);
  }
  const int n = n_modes;
  mass_ = Eigen::MatrixXd::Zero(n, n);
  slope_ = Eigen::MatrixXd::Zero(n, n);
  curvature_ = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t q = 0; q < rule_.size(); ++q) {
    const Eigen::VectorXd v0 = values(rule_.x[q], 0);
    const Eigen::VectorXd v1 = values(rule_.x[q], 1);
    const Eigen::VectorXd v2 = values(rule_.x[q], 2);
    mass_ += rule_.w[q] * v0 * v0.transpose();
    slope_ += rule_.w[q] * v1 * v1.transpose();
    curvature_ += rule_.w[q] * v2 * v2.transpose();
  }
}

double ShellBasis::eigenvalue(int k) const {
  const double b = beta_[k];
  return b * b * b * b;
}

double ShellBasis::value(int k, double a, int order) const {
  if (a < 0.0 || a > length_) return 0.0;
  const double beta = beta_[k];
  const double X = beta * length_;
  const double x = beta * a;
  const double sigma = sigma_[k];
  // ½(1−σ)eˣ evaluated without cancellation.
  const double num = -std::exp(-X) - std::sin(X) + std::cos(X);
  const double den = 1.0 - std::exp(-2.0 * X) - 2.0 * std::sin(X) * std::exp(-X);
  const double grow = num * std::exp(x - X) / den;
  const double decay = 0.5 * (1.0 + sigma) * std::exp(-x);
  const double A = (order % 2 == 0) ? grow + decay : grow - decay;
  const double C0 = -std::cos(x) + sigma * std::sin(x);
  const double C1 = std::sin(x) + sigma * std::cos(x);
  double C = 0.0;
  switch (order % 4) {
    case 0: C = C0; break;
    case 1: C = C1; break;
    case 2: C = -C0; break;
    default: C = -C1; break;
  }
  return norm_[k] * std::pow(beta, order) * (A + C);
}

Eigen::VectorXd ShellBasis::values(double a, int order) const {
  Eigen::VectorXd v(size());
  for (int k = 0; k < size(); ++k) v[k] = value(k, a, order);
  return v;
}

Eigen::MatrixXd ShellBasis::stiffness(const ShellParams& p) const {
  Eigen::MatrixXd S = p.b2 * slope_ + p.b0 * mass_;
  for (int k = 0; k < size(); ++k) S(k, k) += p.m * eigenvalue(k);
  return S;
}

Eigen::VectorXd ShellBasis::project(const std::function<double(double)>& f) const {
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size());
  for (std::size_t q = 0; q < rule_.size(); ++q) rhs += rule_.w[q] * f(rule_.x[q]) * values(rule_.x[q]);
  return mass_.ldlt().solve(rhs);
}

double ShellBasis::evaluate(const Eigen::VectorXd& coeffs, double a, int order) const {
  double s = 0.0;
  for (int k = 0; k < size(); ++k) s += coeffs[k] * value(k, a, order);
  return s;
}

ShellBasis shell_eigenbasis(int n_modes, double length) { return ShellBasis(n_modes, length); }

Eigen::VectorXd koiter_gradient(const Eigen::VectorXd& eta, const ShellBasis& basis,
                                const ShellParams& p) {
  return basis.stiffness(p) * eta;
}

double koiter_energy(const Eigen::VectorXd& eta, const ShellBasis& basis, const ShellParams& p) {
  return 0.5 * eta.dot(koiter_gradient(eta, basis, p));
}

RayDisplacement modal_ray_displacement(const ShellBasis& basis, const ReferenceDomain& ref,
                                       Eigen::VectorXd coeffs, Eigen::VectorXd rates) {
  const double R = ref.radius();
  const ShellBasis* b = &basis;
  const ReferenceDomain* r = &ref;
  if (rates.size() == 0) rates = Eigen::VectorXd::Zero(coeffs.size());
  RayDisplacement d;
  d.value = [b, r, coeffs](double th) {
    if (!r->on_shell(th)) return 0.0;
    return b->evaluate(coeffs, r->shell_coordinate(th), 0);
  };
  d.d_theta = [b, r, coeffs, R](double th) {
    if (!r->on_shell(th)) return 0.0;
    return R * b->evaluate(coeffs, r->shell_coordinate(th), 1);
  };
  d.d_t = [b, r, rates](double th) {
    if (!r->on_shell(th)) return 0.0;
    return b->evaluate(rates, r->shell_coordinate(th), 0);
  };
  return d;
}

double modal_sup(const ShellBasis& basis, const Eigen::VectorXd& coeffs, int samples) {
  double m = 0.0;
  for (int i = 0; i <= samples; ++i)
    m = std::max(m, std::abs(basis.evaluate(coeffs, basis.length() * i / samples)));
  return m;
}

}  // namespace kfsi
