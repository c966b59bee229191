#pragma once

#include <span>
#include <vector>

namespace kfsi {

/// One-dimensional quadrature rule (nodes and weights).
struct Rule1D {
  std::vector<double> x;
  std::vector<double> w;

  std::size_t size() const { return x.size(); }
};

/// Gauss–Legendre rule with n points on [-1, 1].
Rule1D gauss_legendre(int n);

/// Gauss–Legendre rule with n points mapped to [a, b].
Rule1D gauss_legendre(int n, double a, double b);

/// Composite Gauss rule on the cells delimited by `breaks` (strictly increasing).
Rule1D composite_gauss(std::span<const double> breaks, int order);

/// Composite Gauss rule with `cells` equal cells on [a, b].
Rule1D composite_gauss(double a, double b, int cells, int order);

/// Legendre polynomial P_n(x) and its derivative.
void legendre(int n, double x, double& value, double& derivative);

}  // namespace kfsi
