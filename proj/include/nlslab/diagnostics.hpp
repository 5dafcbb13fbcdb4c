#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "nlslab/evolver.hpp"
#include "nlslab/grid.hpp"
#include "nlslab/ground_state.hpp"

namespace nlslab {

struct ResidualSummary {
  double max = 0.0;
  double median = 0.0;
};

/// Balance-law defects per record interval, from centred differences:
///   r_mass   = |dM/dt + (D_mass(n) + D_mass(n+1))/2|
///   r_energy = |dE/dt + a (K(n) + K(n+1))/2|
///   r_mom    = max_j |dP_j/dt + (D_mom,j(n) + D_mom,j(n+1))/2|
/// each divided by max(1, |quantity|). r_energy uses the quoted functional
/// K; r_energy_exact uses K_exact (see FieldFunctionals).
struct IdentityResiduals {
  std::vector<double> t_mid;
  std::vector<double> r_mass;
  std::vector<double> r_energy;
  std::vector<double> r_energy_exact;
  std::vector<double> r_mom;
  ResidualSummary mass;
  ResidualSummary energy;
  ResidualSummary energy_exact;
  ResidualSummary momentum;
};

/// Throws InsufficientRecords for fewer than 3 records.
IdentityResiduals identity_residuals(const Trajectory& traj);

/// Checks |grad u(t)|^2 <= |grad u(0)|^2 exp(a^{-4/(pd-4)} t) along a
/// trajectory; only meaningful for p > 4/d.
struct H1BoundReport {
  double rate = 0.0;         ///< a^{-4/(pd-4)}
  double min_margin = 0.0;   ///< min over records of (bound - |grad u|^2) / bound
  std::size_t worst_record = 0;
  bool holds = false;
};

H1BoundReport h1_bound_check(const Trajectory& traj, const PhysParams& params);

/// int |v|^{4/d+2+p} / ( |grad(|v|^{(p+2)/2})|^2 (int |v|^2)^{2/d} ).
/// Invariant under amplitude scaling, dilation, translation and phase.
double generalized_gn_ratio(const ComplexField& v, const PhysParams& params);

struct GnReport {
  double c_hat = 0.0;      ///< max ratio over the family, a lower bound on C
  std::size_t argmax = 0;
  std::size_t family_size = 0;
  std::string family;
  /// Admissible mass threshold from alpha^{2/d} = 4 / ((p+2)^2 C_p C_hat),
  /// in mass units (the same units as int |u|^2).
  double alpha_hat = 0.0;
  double mass_q = 0.0;
  bool alpha_below_mass_q = false;
};

GnReport estimate_gn_constant(const std::vector<ComplexField>& family, const PhysParams& params,
                              double mass_q, std::string description = "custom");

/// Smooth random field: one to three Gaussian bumps with random centre,
/// width, amplitude, phase and carrier wavenumber.
ComplexField random_smooth_field(const GridPtr& grid, std::mt19937_64& rng);

/// Q, Gaussians on a width x amplitude lattice, then n_random random fields.
std::vector<ComplexField> default_gn_family(const GroundState& gs, std::uint64_t seed,
                                            std::size_t n_random = 100);

/// Largest increase of E between consecutive records.
struct EnergyMonotonicity {
  double max_increase = 0.0;
  std::size_t worst_record = 0;
  bool non_increasing = false;
};

EnergyMonotonicity energy_monotonicity(const Trajectory& traj, double tol = 1e-10);

/// Space-time budget B(t) = 2a int_0^t int |u|^{4/d+2} against the mass lost,
/// for p = 4/d. Time integral by the trapezoid rule over records.
struct BudgetReport {
  std::vector<double> t;
  std::vector<double> budget;
  std::vector<double> mass_loss;
  double initial_mass = 0.0;
  double max_gap = 0.0;  ///< max_j |B(t_j) - (M(0) - M(t_j))|
  bool equality_holds = false;
  bool bounded_by_initial_mass = false;
  bool monotone = false;
};

BudgetReport critical_budget(const Trajectory& traj, const PhysParams& params, double tol = 1e-6);

/// Cauchy increments |v(t_{j+1}) - v(t_j)|_{L2} of the profile pulled back
/// by the free flow, v(t) = exp(-it Delta) u(t), over stored snapshots.
struct ScatteringReport {
  std::vector<double> times;
  std::vector<double> increments;
  bool strictly_decreasing = false;
};

ScatteringReport scattering_monitor(const Trajectory& traj);

}  // namespace nlslab
