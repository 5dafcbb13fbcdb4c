#include "nlslab/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlslab/error.hpp"
#include "nlslab/fft.hpp"
#include "nlslab/functionals.hpp"
#include "nlslab/resample.hpp"

namespace nlslab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void find_crossings(LambdaSeries& s) {
  int k = 1;
  for (std::size_t i = 1; i < s.lambda.size(); ++i) {
    while (s.lambda[i] <= std::ldexp(1.0, -k)) {
      const double level = std::ldexp(1.0, -k);
      double t = s.times[i];
      const double l0 = std::log(s.lambda[i - 1]);
      const double l1 = std::log(s.lambda[i]);
      if (s.lambda[i - 1] > level && l1 < l0) {
        const double w = (l0 - std::log(level)) / (l0 - l1);
        t = s.times[i - 1] + w * (s.times[i] - s.times[i - 1]);
      }
      s.crossing_k.push_back(k);
      s.crossing_times.push_back(t);
      ++k;
    }
  }
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss += r * r;
  }
  f.rms = std::sqrt(ss / n);
  return f;
}

}  // namespace

LambdaSeries lambda_series(std::vector<double> times, std::vector<double> grad_norms, double grad_norm_q) {
  if (times.size() != grad_norms.size())
    throw Error(ErrorKind::DimensionMismatch, "times and gradient norms differ in length");
  LambdaSeries s;
  s.grad_norm_q = grad_norm_q;
  s.times = std::move(times);
  s.grad_norm = std::move(grad_norms);
  s.lambda.reserve(s.grad_norm.size());
  for (double g : s.grad_norm) {
    if (!(g > 0.0)) throw Error(ErrorKind::InvalidArgument, "gradient norm must be positive");
    s.lambda.push_back(grad_norm_q / g);
  }
  find_crossings(s);
  return s;
}

LambdaSeries lambda_series(const Trajectory& traj, const GroundState& gs) {
  std::vector<double> t, g;
  for (const auto& r : traj.records) {
    t.push_back(r.t);
    g.push_back(r.grad_norm);
  }
  return lambda_series(std::move(t), std::move(g), gs.grad_norm);
}

BlowupFit fit_power_law(const LambdaSeries& series, const FitOptions& options) {
  const std::size_t n = series.times.size();
  const auto count = static_cast<std::size_t>(std::llround(options.window_fraction * static_cast<double>(n)));
  if (count < options.min_points || count < 3)
    throw Error(ErrorKind::InsufficientData, "too few points in the fit window");
  BlowupFit fit;
  fit.first = n - count;
  fit.last = n - 1;
  fit.t_a = series.times[fit.first];
  fit.t_b = series.times[fit.last];
  const double span = fit.t_b - fit.t_a;
  if (!(span > 0.0)) throw Error(ErrorKind::InsufficientData, "fit window has zero length");

  std::vector<double> y(count), x(count);
  for (std::size_t i = 0; i < count; ++i) y[i] = std::log(series.grad_norm[fit.first + i]);
  auto fit_at = [&](double t_hat) {
    for (std::size_t i = 0; i < count; ++i) x[i] = std::log(t_hat - series.times[fit.first + i]);
    return least_squares(x, y);
  };
  // Objective in u = log(T - t_b); scan first, then golden-section refine.
  auto objective = [&](double u) { return fit_at(fit.t_b + std::exp(u)).rms; };
  const double u_lo = std::log(span * 1e-9);
  const double u_hi = std::log(2.0 * span);
  constexpr int scan = 400;
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= scan; ++i) {
    const double u = u_lo + (u_hi - u_lo) * i / scan;
    const double v = objective(u);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  const double step = (u_hi - u_lo) / scan;
  double lo = u_lo + step * std::max(best - 1, 0);
  double hi = u_lo + step * std::min(best + 1, scan);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - phi * (hi - lo);
  double d = lo + phi * (hi - lo);
  double fc = objective(c), fd = objective(d);
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - phi * (hi - lo);
      fc = objective(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + phi * (hi - lo);
      fd = objective(d);
    }
  }
  const double u_best = 0.5 * (lo + hi);
  fit.t_hat = fit.t_b + std::exp(u_best);
  const LineFit lf = fit_at(fit.t_hat);
  fit.beta_hat = -lf.slope;
  fit.log_c = lf.intercept;
  fit.rms_residual = lf.rms;
  if (!std::isfinite(fit.rms_residual) || fit.rms_residual > options.max_rms || !(fit.beta_hat > 0.0))
    throw Error(ErrorKind::DegenerateFit, "power-law fit rejected (rms " + std::to_string(fit.rms_residual) +
                                              ", beta " + std::to_string(fit.beta_hat) + ")");
  for (std::size_t i = fit.first; i <= fit.last; ++i) {
    const double tau = fit.t_hat - series.times[i];
    const double ll = std::log(std::abs(std::log(tau)));
    fit.loglog_ratio.push_back(ll > 0.0 ? series.grad_norm[i] * std::sqrt(tau / ll) : kNaN);
  }
  return fit;
}

double relative_spread(const std::vector<double>& values) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double sum = 0.0;
  std::size_t n = 0;
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    sum += v;
    ++n;
  }
  if (n == 0) return kNaN;
  return (hi - lo) / std::abs(sum / static_cast<double>(n));
}

LowerBoundReport lower_bound_check(const BlowupFit& fit, const LambdaSeries& series) {
  LowerBoundReport rep;
  rep.inf_product = std::numeric_limits<double>::infinity();
  for (std::size_t i = fit.first; i <= fit.last && i < series.times.size(); ++i) {
    const double prod = series.grad_norm[i] * std::sqrt(fit.t_hat - series.times[i]);
    rep.inf_product = std::min(rep.inf_product, prod);
    rep.sup_product = std::max(rep.sup_product, prod);
  }
  rep.positive = std::isfinite(rep.inf_product) && rep.inf_product > 0.0;
  return rep;
}

std::vector<DoublingRow> doubling_time_stats(const LambdaSeries& series) {
  if (series.crossing_times.size() < 3)
    throw Error(ErrorKind::InsufficientCrossings, "need at least 3 dyadic crossings");
  std::vector<DoublingRow> rows;
  for (std::size_t j = 0; j + 1 < series.crossing_times.size(); ++j) {
    DoublingRow r;
    r.k = series.crossing_k[j];
    r.t_k = series.crossing_times[j];
    r.interval = series.crossing_times[j + 1] - r.t_k;
    const double lam = std::ldexp(1.0, -r.k);
    r.ratio = r.interval / (r.k * lam * lam);
    rows.push_back(r);
  }
  return rows;
}

ComplexField profile_rescale(const ComplexField& u, const GroundState& gs) {
  const double g = grad_norm(u);
  if (!(g > 0.0)) throw Error(ErrorKind::InvalidArgument, "field has zero gradient");
  const Grid& grid = *u.grid;
  const double rho = gs.grad_norm / g;
  if (rho * static_cast<double>(grid.points_per_axis()) < 16.0)
    throw Error(ErrorKind::InvalidArgument, "rescaled profile is unresolvable (rho N < 16)");
  std::size_t peak = 0;
  for (std::size_t i = 1; i < u.size(); ++i)
    if (std::norm(u[i]) > std::norm(u[peak])) peak = i;
  const std::size_t n = grid.points_per_axis();
  std::array<double, 2> center{};
  if (grid.dim() == 1) {
    center[0] = grid.coordinate(peak);
  } else {
    center[0] = grid.coordinate(peak / n);
    center[1] = grid.coordinate(peak % n);
  }
  ComplexField v = resample(u, center, rho);
  const double amp = std::pow(rho, 0.5 * grid.dim());
  for (auto& z : v.values) z *= amp;
  return v;
}

double profile_distance(const ComplexField& v, const GroundState& gs) {
  if (*v.grid != *gs.profile.grid) throw Error(ErrorKind::DimensionMismatch, "field and Q live on different grids");
  const Grid& grid = *v.grid;
  ComplexField modulus(v.grid);
  for (std::size_t i = 0; i < v.size(); ++i) modulus[i] = Complex(std::abs(v[i]), 0.0);
  // Circular cross-correlation c(s) = sum_j |v|(j + s) Q(j).
  auto a = to_spectral(modulus);
  const auto q = to_spectral(gs.profile);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= std::conj(q[i]);
  const ComplexField corr = from_spectral(v.grid, std::move(a));
  std::size_t shift = 0;
  for (std::size_t i = 1; i < corr.size(); ++i)
    if (corr[i].real() > corr[shift].real()) shift = i;
  const std::size_t n = grid.points_per_axis();
  long double sum = 0.0L;
  if (grid.dim() == 1) {
    for (std::size_t j = 0; j < n; ++j) {
      const double diff = modulus[(j + shift) % n].real() - gs.profile[j].real();
      sum += diff * diff;
    }
  } else {
    const std::size_t si = shift / n, sj = shift % n;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double diff = modulus[((i + si) % n) * n + (j + sj) % n].real() - gs.profile[i * n + j].real();
        sum += diff * diff;
      }
  }
  return std::sqrt(static_cast<double>(sum * grid.cell_volume()));
}

std::vector<double> energy_growth_ratio(const Trajectory& traj) {
  const double pd = traj.params.damping_power() * traj.params.dim();
  std::vector<double> out;
  out.reserve(traj.records.size());
  for (const auto& r : traj.records) {
    if (r.lambda < 1.0 && r.lambda > 0.0)
      out.push_back(r.energy / (std::abs(std::log(r.lambda)) * std::pow(r.lambda, -0.5 * pd)));
    else
      out.push_back(kNaN);
  }
  return out;
}

ExclusionReport exclusion_experiment(const PhysParams& params, const GroundState& gs, double mass_fraction,
                                     const StepControl& ctrl, double t_end) {
  if (!(mass_fraction > 0.0 && mass_fraction < 1.0))
    throw Error(ErrorKind::InvalidArgument, "mass_fraction must lie in (0, 1)");
  if (params.damping_power() * params.dim() >= 4.0)
    throw Error(ErrorKind::InvalidArgument, "exclusion experiment needs 1 <= p < 4/d");
  const GridPtr& grid = gs.profile.grid;
  const double target = mass_fraction * gs.mass;

  ComplexField scaled_q = gs.profile;
  for (auto& z : scaled_q.values) z *= std::sqrt(mass_fraction);
  ComplexField gauss = sample(grid, [](double x, double y) { return Complex(std::exp(-(x * x + y * y)), 0.0); });
  const double gm = mass(gauss);
  for (auto& z : gauss.values) z *= std::sqrt(target / gm);

  ExclusionReport rep;
  rep.mass_fraction = mass_fraction;
  rep.passed = true;
  const std::pair<const char*, const ComplexField*> cases[] = {{"rescaled-Q", &scaled_q}, {"gaussian", &gauss}};
  for (const auto& [label, u0] : cases) {
    const Trajectory traj = evolve(*u0, params, ctrl, t_end, gs);
    ExclusionRun run;
    run.label = label;
    run.termination = traj.termination;
    double min_lambda = traj.records.front().lambda;
    for (const auto& r : traj.records) {
      min_lambda = std::min(min_lambda, r.lambda);
      run.max_amp = std::max(run.max_amp, r.max_amp);
    }
    run.lambda_decrease = traj.records.front().lambda / min_lambda;
    run.final_time = traj.records.back().t;
    run.passed = run.termination == Termination::TimeReached && run.lambda_decrease < 4.0;
    rep.passed = rep.passed && run.passed;
    rep.runs.push_back(run);
  }
  return rep;
}

BlowupRun run_with_dyadic_states(const ComplexField& u0, const PhysParams& params, const StepControl& ctrl,
                                 double t_end, const GroundState& gs) {
  BlowupRun out;
  int next_k = 1;
  EvolveOptions opts;
  opts.observer = [&](const TrajectoryRecord& rec, const ComplexField& u) {
    while (rec.lambda <= std::ldexp(1.0, -next_k)) {
      out.dyadic_k.push_back(next_k);
      out.dyadic_states.push_back({rec.t, u});
      ++next_k;
    }
  };
  out.traj = evolve(u0, params, ctrl, t_end, gs, opts);
  return out;
}

}  // namespace nlslab
