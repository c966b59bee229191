#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "koiter_fsi/geometry.hpp"

namespace kfsi::oracle {

/// Lowest `count` eigenvalues of ∂⁴ with clamped ends on [0, length], dense 5-point finite
/// differences on `points` interior nodes.
std::vector<double> clamped_beam_eigenvalues(int points, double length, int count);

struct BeamProfile {
  std::vector<double> a;
  std::vector<double> w;
};

/// Static clamped beam m w'''' − b2 w'' + b0 w = load on `points` interior nodes.
BeamProfile static_beam(int points, double length, double m, double b2, double b0,
                        const std::function<double(double)>& load);

/// Heat equation ∂_tρ = εΔρ on the unit square with Neumann walls, cell-centred 5-point
/// Laplacian and Crank–Nicolson. Returns the n×n cell values at the final time
/// (row = x index).
Eigen::MatrixXd square_heat_cn(int n, double epsilon, const std::function<double(double, double)>& rho0,
                               double horizon, int steps);

/// Fourth-order central-difference Laplacian of f at x with spacing h.
double laplacian(const std::function<double(const Vec2&)>& f, const Vec2& x, double h);

/// Jacobian by central differences of a planar map.
Mat2 jacobian(const std::function<Vec2(const Vec2&)>& map, const Vec2& x, double h);

}  // namespace kfsi::oracle
