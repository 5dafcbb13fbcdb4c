#include "nlslab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nlslab/error.hpp"
#include "nlslab/functionals.hpp"

namespace nlslab {

namespace {

ResidualSummary summarize(std::vector<double> values) {
  ResidualSummary s;
  if (values.empty()) return s;
  s.max = *std::max_element(values.begin(), values.end());
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  s.median = *mid;
  if (values.size() % 2 == 0) {
    const double lower = *std::max_element(values.begin(), mid);
    s.median = 0.5 * (s.median + lower);
  }
  return s;
}

double normalizer(double x, double y) { return std::max(1.0, std::abs(0.5 * (x + y))); }

}  // namespace

IdentityResiduals identity_residuals(const Trajectory& traj) {
  const auto& rec = traj.records;
  if (rec.size() < 3) throw Error(ErrorKind::InsufficientRecords, "need at least 3 records");
  const double a = traj.params.damping();
  const auto dim = static_cast<std::size_t>(traj.params.dim());
  IdentityResiduals out;
  for (std::size_t n = 0; n + 1 < rec.size(); ++n) {
    const auto& r0 = rec[n];
    const auto& r1 = rec[n + 1];
    const double h = r1.t - r0.t;
    out.t_mid.push_back(0.5 * (r0.t + r1.t));
    out.r_mass.push_back(std::abs((r1.mass - r0.mass) / h + 0.5 * (r0.d_mass + r1.d_mass)) /
                         normalizer(r0.mass, r1.mass));
    const double de = (r1.energy - r0.energy) / h;
    const double en = normalizer(r0.energy, r1.energy);
    out.r_energy.push_back(std::abs(de + 0.5 * a * (r0.k_quoted + r1.k_quoted)) / en);
    out.r_energy_exact.push_back(std::abs(de + 0.5 * a * (r0.k_exact + r1.k_exact)) / en);
    double worst = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      const double r = std::abs((r1.momentum[j] - r0.momentum[j]) / h + 0.5 * (r0.d_mom[j] + r1.d_mom[j])) /
                       normalizer(r0.momentum[j], r1.momentum[j]);
      worst = std::max(worst, r);
    }
    out.r_mom.push_back(worst);
  }
  out.mass = summarize(out.r_mass);
  out.energy = summarize(out.r_energy);
  out.energy_exact = summarize(out.r_energy_exact);
  out.momentum = summarize(out.r_mom);
  return out;
}

H1BoundReport h1_bound_check(const Trajectory& traj, const PhysParams& params) {
  const double pd = params.damping_power() * params.dim();
  if (!(pd > 4.0)) throw Error(ErrorKind::InvalidArgument, "the H1 bound needs p > 4/d");
  if (!(params.damping() > 0.0)) throw Error(ErrorKind::InvalidArgument, "the H1 bound needs a > 0");
  if (traj.records.empty()) throw Error(ErrorKind::InsufficientRecords, "empty trajectory");
  H1BoundReport rep;
  rep.rate = std::pow(params.damping(), -4.0 / (pd - 4.0));
  const double w0 = traj.records.front().grad_norm * traj.records.front().grad_norm;
  rep.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < traj.records.size(); ++i) {
    const auto& r = traj.records[i];
    const double bound = w0 * std::exp(rep.rate * r.t);
    const double margin = (bound - r.grad_norm * r.grad_norm) / bound;
    if (margin < rep.min_margin) {
      rep.min_margin = margin;
      rep.worst_record = i;
    }
  }
  rep.holds = rep.min_margin >= -1e-12;
  return rep;
}

double generalized_gn_ratio(const ComplexField& v, const PhysParams& params) {
  const double p = params.damping_power();
  if (p < 1.0 || p > 2.0) throw Error(ErrorKind::InvalidArgument, "the ratio is defined for 1 <= p <= 2");
  const double m = mass(v);
  if (!(m > 0.0)) throw Error(ErrorKind::DivisionByZero, "field is identically zero");
  ComplexField w(v.grid);
  for (std::size_t i = 0; i < v.size(); ++i)
    w[i] = Complex(abs_pow_from_sq(std::norm(v[i]), 0.5 * (p + 2.0)), 0.0);
  const double g = grad_norm_sq(w);
  if (!(g > 0.0)) throw Error(ErrorKind::DivisionByZero, "|v|^{(p+2)/2} has zero gradient");
  const double numerator = lp_norm_pow(v, params.sigma() + 2.0 + p);
  return numerator / (g * std::pow(m, 2.0 / params.dim()));
}

GnReport estimate_gn_constant(const std::vector<ComplexField>& family, const PhysParams& params,
                              double mass_q, std::string description) {
  if (family.empty()) throw Error(ErrorKind::EmptyFamily, "no trial fields");
  GnReport rep;
  rep.family_size = family.size();
  rep.family = std::move(description);
  rep.c_hat = -1.0;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const double r = generalized_gn_ratio(family[i], params);
    if (r > rep.c_hat) {
      rep.c_hat = r;
      rep.argmax = i;
    }
  }
  const double p = params.damping_power();
  const double rhs = 4.0 / ((p + 2.0) * (p + 2.0) * params.c_p() * rep.c_hat);
  rep.alpha_hat = std::pow(rhs, 0.5 * params.dim());
  rep.mass_q = mass_q;
  rep.alpha_below_mass_q = rep.alpha_hat > 0.0 && rep.alpha_hat < mass_q;
  return rep;
}

ComplexField random_smooth_field(const GridPtr& grid, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 3);
  std::uniform_real_distribution<double> centre(-0.25 * grid->half_width(), 0.25 * grid->half_width());
  std::uniform_real_distribution<double> width(0.5, 2.5);
  std::uniform_real_distribution<double> amplitude(0.2, 2.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> carrier(-2.0, 2.0);
  struct Bump {
    double cx, cy, w, amp, phi, kx, ky;
  };
  std::vector<Bump> bumps(static_cast<std::size_t>(count(rng)));
  for (auto& b : bumps) {
    b.cx = centre(rng);
    b.cy = grid->dim() == 2 ? centre(rng) : 0.0;
    b.w = width(rng);
    b.amp = amplitude(rng);
    b.phi = phase(rng);
    b.kx = carrier(rng);
    b.ky = grid->dim() == 2 ? carrier(rng) : 0.0;
  }
  return sample(grid, [&](double x, double y) {
    Complex z(0.0, 0.0);
    for (const auto& b : bumps) {
      const double r2 = (x - b.cx) * (x - b.cx) + (y - b.cy) * (y - b.cy);
      z += std::polar(b.amp * std::exp(-r2 / (b.w * b.w)), b.phi + b.kx * x + b.ky * y);
    }
    return z;
  });
}

std::vector<ComplexField> default_gn_family(const GroundState& gs, std::uint64_t seed, std::size_t n_random) {
  const GridPtr& grid = gs.profile.grid;
  std::vector<ComplexField> family;
  family.push_back(gs.profile);
  for (double w : {0.5, 1.0, 2.0, 3.0})
    for (double amp : {0.5, 1.0, 2.0})
      family.push_back(sample(grid, [&](double x, double y) {
        return Complex(amp * std::exp(-(x * x + y * y) / (w * w)), 0.0);
      }));
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < n_random; ++i) family.push_back(random_smooth_field(grid, rng));
  return family;
}

EnergyMonotonicity energy_monotonicity(const Trajectory& traj, double tol) {
  EnergyMonotonicity rep;
  rep.max_increase = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < traj.records.size(); ++i) {
    const double inc = traj.records[i].energy - traj.records[i - 1].energy;
    if (inc > rep.max_increase) {
      rep.max_increase = inc;
      rep.worst_record = i;
    }
  }
  rep.non_increasing = rep.max_increase <= tol;
  return rep;
}

BudgetReport critical_budget(const Trajectory& traj, const PhysParams& params, double tol) {
  if (!params.is_critical_damping()) throw Error(ErrorKind::InvalidArgument, "budget requires p = 4/d");
  const auto& rec = traj.records;
  if (rec.empty()) throw Error(ErrorKind::InsufficientRecords, "empty trajectory");
  BudgetReport rep;
  rep.initial_mass = rec.front().mass;
  double b = 0.0;
  rep.monotone = true;
  for (std::size_t i = 0; i < rec.size(); ++i) {
    if (i > 0) {
      const double inc = 0.5 * (rec[i].t - rec[i - 1].t) * (rec[i].d_mass + rec[i - 1].d_mass);
      if (inc < 0.0) rep.monotone = false;
      b += inc;
    }
    rep.t.push_back(rec[i].t);
    rep.budget.push_back(b);
    rep.mass_loss.push_back(rep.initial_mass - rec[i].mass);
    rep.max_gap = std::max(rep.max_gap, std::abs(b - rep.mass_loss.back()));
  }
  rep.equality_holds = rep.max_gap < tol;
  rep.bounded_by_initial_mass = b <= rep.initial_mass;
  return rep;
}

ScatteringReport scattering_monitor(const Trajectory& traj) {
  if (!traj.params.is_critical_damping())
    throw Error(ErrorKind::InvalidArgument, "scattering monitor requires p = 4/d");
  if (traj.snapshots.size() < 3) throw Error(ErrorKind::InsufficientData, "need at least 3 snapshots");
  ScatteringReport rep;
  std::vector<ComplexField> pulled;
  for (const auto& s : traj.snapshots) {
    rep.times.push_back(s.t);
    pulled.push_back(linear_substep(s.field, -s.t));
  }
  for (std::size_t j = 0; j + 1 < pulled.size(); ++j) {
    ComplexField diff = pulled[j + 1];
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= pulled[j][i];
    rep.increments.push_back(std::sqrt(mass(diff)));
  }
  rep.strictly_decreasing = true;
  for (std::size_t j = 1; j < rep.increments.size(); ++j)
    if (!(rep.increments[j] < rep.increments[j - 1])) rep.strictly_decreasing = false;
  return rep;
}

}  // namespace nlslab
