#include "koiter_fsi/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kfsi {

void legendre(int n, double x, double& value, double& derivative) {
  if (n == 0) {
    value = 1.0;
    derivative = 0.0;
    return;
  }
  double p0 = 1.0;
  double p1 = x;
  double d0 = 0.0;
  double d1 = 1.0;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    const double d2 = d0 + (2.0 * k - 1.0) * p1;
    p0 = p1;
    p1 = p2;
    d0 = d1;
    d1 = d2;
  }
  value = p1;
  derivative = d1;
}

Rule1D gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  Rule1D rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double p = 0.0;
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      legendre(n, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(n, x, p, dp);
    rule.x[n - 1 - i] = x;
    rule.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

Rule1D gauss_legendre(int n, double a, double b) {
  Rule1D ref = gauss_legendre(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    ref.x[i] = mid + half * ref.x[i];
    ref.w[i] *= half;
  }
  return ref;
}

Rule1D composite_gauss(std::span<const double> breaks, int order) {
  const Rule1D ref = gauss_legendre(order);
  Rule1D out;
  for (std::size_t c = 0; c + 1 < breaks.size(); ++c) {
    const double a = breaks[c];
    const double b = breaks[c + 1];
    if (!(b > a)) throw std::invalid_argument("composite_gauss: breaks must increase");
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (std::size_t i = 0; i < ref.size(); ++i) {
      out.x.push_back(mid + half * ref.x[i]);
      out.w.push_back(half * ref.w[i]);
    }
  }
  return out;
}

Rule1D composite_gauss(double a, double b, int cells, int order) {
  std::vector<double> breaks(cells + 1);
  for (int i = 0; i <= cells; ++i) breaks[i] = a + (b - a) * i / cells;
  return composite_gauss(breaks, order);
}

}  // namespace kfsi
