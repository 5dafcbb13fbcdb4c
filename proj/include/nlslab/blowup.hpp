#pragma once

#include <string>
#include <vector>

#include "nlslab/evolver.hpp"
#include "nlslab/grid.hpp"
#include "nlslab/ground_state.hpp"

namespace nlslab {

/// lambda(t) = |grad Q| / |grad u(t)| per record, with the downward dyadic
/// crossings lambda(t_k) = 2^{-k}, k >= 1.
struct LambdaSeries {
  double grad_norm_q = 1.0;
  std::vector<double> times;
  std::vector<double> lambda;
  std::vector<double> grad_norm;
  std::vector<int> crossing_k;
  std::vector<double> crossing_times;
};

LambdaSeries lambda_series(const Trajectory& traj, const GroundState& gs);
/// Same construction from raw (t, |grad u|) samples.
LambdaSeries lambda_series(std::vector<double> times, std::vector<double> grad_norms,
                           double grad_norm_q = 1.0);

/// |grad u(t)| ~ c (T - t)^{-beta} over a trailing window.
struct BlowupFit {
  double t_hat = 0.0;
  double beta_hat = 0.0;
  double log_c = 0.0;
  double t_a = 0.0;
  double t_b = 0.0;
  std::size_t first = 0;  ///< index range [first, last] of the window
  std::size_t last = 0;
  double rms_residual = 0.0;
  /// g(t) sqrt((T - t) / log|log(T - t)|); NaN where T - t >= 1/e.
  std::vector<double> loglog_ratio;
};

struct FitOptions {
  double window_fraction = 0.3;
  std::size_t min_points = 30;
  /// Fits with a larger rms log residual are rejected as DegenerateFit.
  double max_rms = 0.25;
};

BlowupFit fit_power_law(const LambdaSeries& series, const FitOptions& options = {});

/// (max - min) / mean over the finite entries.
double relative_spread(const std::vector<double>& values);

struct LowerBoundReport {
  double inf_product = 0.0;  ///< inf over the window of |grad u| sqrt(T - t)
  double sup_product = 0.0;
  bool positive = false;
};

LowerBoundReport lower_bound_check(const BlowupFit& fit, const LambdaSeries& series);

struct DoublingRow {
  int k = 0;
  double t_k = 0.0;
  double interval = 0.0;  ///< t_{k+1} - t_k
  double ratio = 0.0;     ///< interval / (k lambda(t_k)^2)
};

/// Throws InsufficientCrossings with fewer than 3 crossings.
std::vector<DoublingRow> doubling_time_stats(const LambdaSeries& series);

/// v(x) = rho^{d/2} u(c + rho x) with rho = |grad Q| / |grad u| and c the
/// location of max|u|, so that |grad v| = |grad Q|. Throws InvalidArgument
/// when rho N < 16.
ComplexField profile_rescale(const ComplexField& u, const GroundState& gs);

/// min over lattice translations of | |v| - Q |_{L2}.
double profile_distance(const ComplexField& v, const GroundState& gs);

/// E(u) / (|log lambda| lambda^{-pd/2}) per record with lambda < 1, NaN
/// otherwise. A monitor only; no bound is asserted.
std::vector<double> energy_growth_ratio(const Trajectory& traj);

struct ExclusionRun {
  std::string label;
  Termination termination = Termination::NumericalFailure;
  double lambda_decrease = 0.0;  ///< lambda(0) / min lambda
  double max_amp = 0.0;
  double final_time = 0.0;
  bool passed = false;
};

struct ExclusionReport {
  double mass_fraction = 0.0;
  std::vector<ExclusionRun> runs;
  bool passed = false;
};

/// Evolves sqrt(f) Q and a Gaussian of mass f M(Q) for f = mass_fraction < 1
/// and checks that neither run focuses: TimeReached and a lambda decrease
/// below 4.
ExclusionReport exclusion_experiment(const PhysParams& params, const GroundState& gs, double mass_fraction,
                                     const StepControl& ctrl, double t_end);

/// Trajectory plus the first state past each dyadic lambda level.
struct BlowupRun {
  Trajectory traj;
  std::vector<int> dyadic_k;
  std::vector<Snapshot> dyadic_states;
};

BlowupRun run_with_dyadic_states(const ComplexField& u0, const PhysParams& params, const StepControl& ctrl,
                                 double t_end, const GroundState& gs);

}  // namespace nlslab
