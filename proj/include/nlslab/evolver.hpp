#pragma once

#include <array>
#include <functional>
#include <string_view>
#include <vector>

#include "nlslab/fft.hpp"
#include "nlslab/grid.hpp"
#include "nlslab/ground_state.hpp"

namespace nlslab {

struct StepControl {
  double dt_max = 1e-3;
  double dt_min = 1e-10;
  double cfl_nl = 0.01;
  double amp_cap = 1e6;
  /// Blow-up is declared once lambda < lambda_floor * dx.
  double lambda_floor = 4.0;

  void validate() const;
};

enum class Termination { TimeReached, BlowupResolutionLimit, AmplitudeCap, NumericalFailure };

std::string_view to_string(Termination t);

struct TrajectoryRecord {
  double t = 0.0;
  double dt = 0.0;  ///< step that produced this record (0 for the initial one)
  double mass = 0.0;
  double energy = 0.0;
  std::array<double, 2> momentum{};
  double grad_norm = 0.0;
  double max_amp = 0.0;
  double lambda = 0.0;
  double d_mass = 0.0;
  double k_quoted = 0.0;
  double k_exact = 0.0;
  std::array<double, 2> d_mom{};
  double potential = 0.0;  ///< int |u|^{4/d+2}
};

struct Snapshot {
  double t = 0.0;
  ComplexField field;
};

struct Trajectory {
  PhysParams params{1, 1.0, 0.0};
  std::vector<TrajectoryRecord> records;
  std::vector<Snapshot> snapshots;
  Termination termination = Termination::NumericalFailure;
  /// Last finite state reached.
  ComplexField final_state;
};

struct EvolveOptions {
  /// Times at which the state is stored; steps are shortened to land on them.
  std::vector<double> snapshot_times;
  /// Called after every record with the state it describes.
  std::function<void(const TrajectoryRecord&, const ComplexField&)> observer;
};

/// Strang splitting for iu_t + Delta u + s|u|^{4/d}u + ia|u|^p u = 0: half
/// linear flow, exact pointwise nonlinear flow, 2/3-rule truncation, half
/// linear flow.
class SplitStepEvolver {
public:
  SplitStepEvolver(GridPtr grid, PhysParams params);

  /// Exact free flow exp(it Delta); dt may have either sign.
  void linear(ComplexField& u, double dt);
  /// Exact solution of iu_t = -s|u|^{4/d}u - ia|u|^p u at every sample.
  void nonlinear(ComplexField& u, double dt) const;
  void step(ComplexField& u, double dt);

  const PhysParams& params() const noexcept { return params_; }
  const GridPtr& grid() const noexcept { return grid_; }

private:
  void update_multiplier(double dt);

  GridPtr grid_;
  PhysParams params_;
  Fft fft_;
  std::vector<double> k2_;
  std::vector<unsigned char> keep_;  // 2/3-rule mask
  std::vector<Complex> multiplier_;
  double multiplier_dt_ = 0.0;
  std::vector<Complex> work_;
};

ComplexField linear_substep(const ComplexField& u, double dt);
ComplexField nonlinear_substep(const ComplexField& u, double dt, const PhysParams& params);
/// Throws NumericalFailure when the result is not finite.
ComplexField strang_step(const ComplexField& u, double dt, const PhysParams& params);

/// Adaptive integration to t_end with per-step records. Stops early on
/// lambda < lambda_floor * dx (blow-up no longer resolvable), on max|u| >
/// amp_cap, or on a non-finite state (keeping the last valid one).
Trajectory evolve(const ComplexField& u0, const PhysParams& params, const StepControl& ctrl,
                  double t_end, const GroundState& gs, const EvolveOptions& options = {});

/// Explicit solution S(t,x) = |t|^{-d/2} Q(x/t) exp(i|x|^2/(4t) - i/t) of the
/// undamped equation iu_t + Delta u + |u|^{4/d}u = 0, the pseudo-conformal
/// image of e^{it}Q. For t < 0 it concentrates as t -> 0.
ComplexField pseudo_conformal_s(double t, const GridPtr& grid, const GroundState& gs);

}  // namespace nlslab
