#pragma once

#include <string>
#include <vector>

#include "koiter_fsi/coupling.hpp"

namespace kfsi {

struct EnergyReport {
  double energy0 = 0.0;
  double max_violation = 0.0;       // max over rows of (E + D − E₀ − W)⁺
  double max_step_violation = 0.0;  // max |ΔE + ΔD − ΔW| per step
};

EnergyReport energy_budget(const std::vector<LedgerRow>& ledger, double tol = 0.0);

/// Concave knee T: z below 1, quintic on [1, 3], 2 above.
double knee(double z);
double knee_derivative(double z);
/// T_k(z) = k T(z/k).
double truncation(double z, double k);
/// z ln z below k, z ln k + z∫_k^z T_k(s)/s² ds above.
double log_truncation(double z, double k);
/// z ln z with 0 ln 0 = 0.
double entropy_density(double z);

struct TruncationValues {
  double T = 0.0;
  double L = 0.0;
  double entropy = 0.0;
};

/// ∫T_k(ρ), ∫L_k(ρ), ∫ρ ln ρ over one level. Values in [−1e−8, 0) count as 0;
/// anything below throws NegativeDensity.
TruncationValues truncation_functionals(const CoupledSolver& solver, const LevelState& s, double k);

/// Product of quintic smoothsteps on the square [−h, h]² (ramps of width h/2), placed in
/// the part of the disk that no chart moves.
struct InteriorBump {
  double h = 0.5;

  double operator()(const Vec2& x) const;
  bool in_cube(const Vec2& x) const { return std::abs(x.x()) <= h && std::abs(x.y()) <= h; }
};

InteriorBump interior_bump(const CoupledSolver& solver);

struct FluxSample {
  std::vector<Vec2> x;
  Eigen::VectorXd F;  // aρ^γ + δρ^β − (λ+2μ) div u at the frame nodes
  double pairing = 0.0;  // ∫ψ²Fρ
};

FluxSample effective_viscous_flux(const CoupledSolver& solver, const LevelState& s,
                                  const InteriorBump& psi);

/// ∫∫ψ²Fρ over the stored levels (trapezoid in time).
double flux_pairing(const CoupledSolver& solver, const std::vector<LevelState>& levels);

/// ∫∫_Q ρ^{γ+1} over the interior square Q of the bump.
double higher_integrability(const CoupledSolver& solver, const std::vector<LevelState>& levels);

/// |∫ρ ln ρ(t) − ∫ρ₀ ln ρ₀ + ∫₀ᵗ∫ρ div u| at the final level.
double entropy_residual(const CoupledSolver& solver, const std::vector<LevelState>& levels);

struct ConcentrationProbe {
  double K = 0.0;
  double boundary_mass = 0.0;  // ∫∫ p over {0 ≤ η − s < 1/K}
  double p_div_phi = 0.0;      // ∫∫ p div φ
  double time_pairing = 0.0;   // ∫∫ ρu·∂_tφ
  double xi3_trace = 0.0;      // max |ξ³_jj| over the samples
};

/// Test field φ = φ_cut·max{K(s − η), −1}·ν in reference tube coordinates. Levels are
/// subsampled to at most `max_levels`.
ConcentrationProbe boundary_concentration_probe(const CoupledSolver& solver,
                                                const std::vector<LevelState>& levels, double K,
                                                int max_levels = 11);

struct ProbeRow {
  std::string name;
  double param = 0.0;
  double value = 0.0;
};

/// The probe table written next to the ledger.
std::vector<ProbeRow> standard_probes(const CoupledSolver& solver, const RunReport& run);

}  // namespace kfsi
