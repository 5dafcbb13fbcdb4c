#include "nlslab/evolver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nlslab/dissipation.hpp"
#include "nlslab/error.hpp"
#include "nlslab/functionals.hpp"
#include "nlslab/resample.hpp"

namespace nlslab {

namespace {

struct GaussLegendre16 {
  std::array<double, 16> nodes{};
  std::array<double, 16> weights{};

  GaussLegendre16() {
    constexpr int n = 16;
    for (int i = 0; i < n; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes[static_cast<std::size_t>(i)] = x;
      weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

const GaussLegendre16& gauss_legendre() {
  static const GaussLegendre16 rule;
  return rule;
}

// int_0^dt (1 + c s)^{-m} ds
double phase_integral(double c, double m, double dt) {
  const double x = c * dt;
  if (x == 0.0) return dt;
  const double l = std::log1p(x);
  double value;
  if (m == 1.0) {
    value = l / c;
  } else {
    value = std::expm1((1.0 - m) * l) / (c * (1.0 - m));
  }
  if (std::isfinite(value)) return value;
  const auto& gl = gauss_legendre();
  double sum = 0.0;
  for (std::size_t i = 0; i < 16; ++i) {
    const double s = 0.5 * dt * (gl.nodes[i] + 1.0);
    sum += gl.weights[i] * std::exp(-m * std::log1p(c * s));
  }
  return 0.5 * dt * sum;
}

}  // namespace

void StepControl::validate() const {
  if (!(dt_min > 0.0) || !(dt_min < dt_max))
    throw Error(ErrorKind::InvalidArgument, "step control requires 0 < dt_min < dt_max");
  if (!(amp_cap > 0.0)) throw Error(ErrorKind::InvalidArgument, "amp_cap must be positive");
  if (!(cfl_nl > 0.0)) throw Error(ErrorKind::InvalidArgument, "cfl_nl must be positive");
  if (!(lambda_floor >= 2.0)) throw Error(ErrorKind::InvalidArgument, "lambda_floor must be >= 2");
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::TimeReached: return "TimeReached";
    case Termination::BlowupResolutionLimit: return "BlowupResolutionLimit";
    case Termination::AmplitudeCap: return "AmplitudeCap";
    case Termination::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

SplitStepEvolver::SplitStepEvolver(GridPtr grid, PhysParams params)
    : grid_(std::move(grid)), params_(params), fft_(*grid_), k2_(grid_->size()),
      keep_(grid_->size()), multiplier_(grid_->size(), Complex(1.0, 0.0)), work_(grid_->size()) {
  if (grid_->dim() != params_.dim())
    throw Error(ErrorKind::DimensionMismatch, "grid and parameter dimensions differ");
  const std::size_t n = grid_->points_per_axis();
  const double cutoff = static_cast<double>(n) / 3.0;
  auto retained = [&](std::size_t m) {
    const double sm = m < n / 2 ? static_cast<double>(m) : static_cast<double>(m) - static_cast<double>(n);
    return std::abs(sm) <= cutoff;
  };
  for (std::size_t idx = 0; idx < grid_->size(); ++idx) {
    keep_[idx] = grid_->dim() == 1 ? retained(idx) : (retained(idx / n) && retained(idx % n));
  }
  for_each_mode(*grid_, [&](std::size_t idx, double kx, double ky) { k2_[idx] = kx * kx + ky * ky; });
}

void SplitStepEvolver::update_multiplier(double dt) {
  if (dt == multiplier_dt_) return;
  for (std::size_t i = 0; i < k2_.size(); ++i) multiplier_[i] = std::polar(1.0, -k2_[i] * dt);
  multiplier_dt_ = dt;
}

void SplitStepEvolver::linear(ComplexField& u, double dt) {
  if (dt == 0.0) return;
  update_multiplier(dt);
  fft_.forward(u.values, u.values);
  for (std::size_t i = 0; i < k2_.size(); ++i) u[i] *= multiplier_[i];
  fft_.inverse(u.values, u.values);
}

void SplitStepEvolver::nonlinear(ComplexField& u, double dt) const {
  if (dt < 0.0) throw Error(ErrorKind::InvalidArgument, "nonlinear substep needs dt >= 0");
  if (dt == 0.0) return;
  const double a = params_.damping();
  const double p = params_.damping_power();
  const double s = params_.focusing_sign();
  const double d = params_.dim();
  const double m = 4.0 / (p * d);
  for (auto& z : u.values) {
    const double rho0 = std::norm(z);
    if (rho0 == 0.0) continue;
    const double focus = s * abs_pow_from_sq(rho0, 4.0 / d);
    if (a == 0.0) {
      z *= std::polar(1.0, focus * dt);
      continue;
    }
    const double c = a * p * abs_pow_from_sq(rho0, p);
    const double decay = std::exp(-std::log1p(c * dt) / p);  // sqrt(rho/rho0)
    const double theta = focus * phase_integral(c, m, dt);
    z *= std::polar(decay, theta);
  }
}

void SplitStepEvolver::step(ComplexField& u, double dt) {
  if (dt < 0.0) throw Error(ErrorKind::InvalidArgument, "Strang step needs dt >= 0");
  if (dt == 0.0) return;
  linear(u, 0.5 * dt);
  nonlinear(u, dt);
  fft_.forward(u.values, u.values);
  for (std::size_t i = 0; i < k2_.size(); ++i) u[i] = keep_[i] ? u[i] * multiplier_[i] : Complex(0.0, 0.0);
  fft_.inverse(u.values, u.values);
}

ComplexField linear_substep(const ComplexField& u, double dt) {
  ComplexField out = u;
  SplitStepEvolver(u.grid, PhysParams(u.grid->dim(), 1.0, 0.0)).linear(out, dt);
  return out;
}

ComplexField nonlinear_substep(const ComplexField& u, double dt, const PhysParams& params) {
  ComplexField out = u;
  SplitStepEvolver(u.grid, params).nonlinear(out, dt);
  return out;
}

ComplexField strang_step(const ComplexField& u, double dt, const PhysParams& params) {
  ComplexField out = u;
  SplitStepEvolver(u.grid, params).step(out, dt);
  if (!out.all_finite()) throw Error(ErrorKind::NumericalFailure, "non-finite sample after Strang step");
  return out;
}

namespace {

TrajectoryRecord make_record(double t, double dt, const ComplexField& u, const PhysParams& params,
                             const GroundState& gs) {
  const auto f = field_functionals(u, params);
  TrajectoryRecord r;
  r.t = t;
  r.dt = dt;
  r.mass = f.mass;
  r.energy = f.energy;
  r.momentum = f.momentum;
  r.grad_norm = std::sqrt(f.grad_sq);
  r.max_amp = f.max_amp;
  r.lambda = r.grad_norm > 0.0 ? gs.grad_norm / r.grad_norm : std::numeric_limits<double>::infinity();
  r.d_mass = f.d_mass;
  r.k_quoted = f.k_quoted;
  r.k_exact = f.k_exact;
  r.d_mom = f.d_mom;
  r.potential = f.potential;
  return r;
}

}  // namespace

Trajectory evolve(const ComplexField& u0, const PhysParams& params, const StepControl& ctrl,
                  double t_end, const GroundState& gs, const EvolveOptions& options) {
  ctrl.validate();
  if (!u0.all_finite()) throw Error(ErrorKind::InvalidArgument, "initial state is not finite");
  if (!(t_end > 0.0)) throw Error(ErrorKind::InvalidArgument, "t_end must be positive");
  if (gs.dim != params.dim() || !(gs.grad_norm > 0.0))
    throw Error(ErrorKind::InvalidArgument, "ground state does not match the parameters");

  std::vector<double> targets;
  for (double ts : options.snapshot_times)
    if (ts > 0.0 && ts < t_end) targets.push_back(ts);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  targets.push_back(t_end);

  Trajectory traj;
  traj.params = params;
  SplitStepEvolver stepper(u0.grid, params);
  ComplexField u = u0;
  double t = 0.0;

  auto push = [&](double dt) {
    traj.records.push_back(make_record(t, dt, u, params, gs));
    if (options.observer) options.observer(traj.records.back(), u);
  };
  push(0.0);
  for (double ts : options.snapshot_times)
    if (ts == 0.0) traj.snapshots.push_back({0.0, u});

  const double lambda_min = ctrl.lambda_floor * u0.grid->dx();
  const double focus_power = params.sigma();
  const double p = params.damping_power();
  const double a = params.damping();
  std::size_t next = 0;
  traj.termination = Termination::TimeReached;
  ComplexField trial(u0.grid);

  while (next < targets.size()) {
    const double amp = traj.records.back().max_amp;
    const double stiffness = std::max({std::pow(amp, focus_power), a * std::pow(amp, p), 1.0});
    double dt = std::clamp(ctrl.cfl_nl / stiffness, ctrl.dt_min, ctrl.dt_max);
    const double target = targets[next];
    bool lands = false;
    if (t + dt >= target - 1e-3 * dt) {
      dt = target - t;
      lands = true;
    }
    trial.values = u.values;
    stepper.step(trial, dt);
    if (!trial.all_finite()) {
      traj.termination = Termination::NumericalFailure;
      break;
    }
    std::swap(u, trial);
    t = lands ? target : t + dt;
    push(dt);
    if (lands) {
      if (next + 1 < targets.size()) traj.snapshots.push_back({t, u});
      ++next;
    }
    const auto& rec = traj.records.back();
    if (rec.max_amp > ctrl.amp_cap) {
      traj.termination = Termination::AmplitudeCap;
      break;
    }
    if (rec.lambda < lambda_min) {
      traj.termination = Termination::BlowupResolutionLimit;
      break;
    }
  }
  // The final time is stored as a snapshot when requested explicitly.
  if (traj.termination == Termination::TimeReached &&
      std::find(options.snapshot_times.begin(), options.snapshot_times.end(), t_end) !=
          options.snapshot_times.end())
    traj.snapshots.push_back({t_end, u});
  traj.final_state = std::move(u);
  return traj;
}

ComplexField pseudo_conformal_s(double t, const GridPtr& grid, const GroundState& gs) {
  if (t == 0.0) throw Error(ErrorKind::InvalidArgument, "S(t) is singular at t = 0");
  if (*gs.profile.grid != *grid)
    throw Error(ErrorKind::DimensionMismatch, "ground state lives on another grid");
  const double d = grid->dim();
  ComplexField s = resample(gs.profile, {0.0, 0.0}, 1.0 / t);
  const double amp = std::pow(std::abs(t), -0.5 * d);
  // Resampling wraps periodically; Q(x/t) is taken as zero once x/t leaves
  // the box instead of repeating.
  const std::size_t n = grid->points_per_axis();
  const double limit = grid->half_width() * std::abs(t);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double x = grid->coordinate(grid->dim() == 1 ? i : i / n);
    const double y = grid->dim() == 1 ? 0.0 : grid->coordinate(i % n);
    if (std::abs(x) >= limit || std::abs(y) >= limit) {
      s[i] = Complex(0.0, 0.0);
      continue;
    }
    const double r2 = radius_squared(*grid, i);
    s[i] *= std::polar(amp, r2 / (4.0 * t) - 1.0 / t);
  }
  return s;
}

}  // namespace nlslab
