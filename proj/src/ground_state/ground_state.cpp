#include "nlslab/ground_state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlslab/error.hpp"
#include "nlslab/fft.hpp"
#include "nlslab/functionals.hpp"

namespace nlslab {

namespace {

std::vector<double> laplacian_symbol(const Grid& grid) {
  std::vector<double> k2(grid.size());
  for_each_mode(grid, [&](std::size_t idx, double kx, double ky) { k2[idx] = kx * kx + ky * ky; });
  return k2;
}

void require_dim(const Grid& grid, int d) {
  if (grid.dim() != d)
    throw Error(ErrorKind::DimensionMismatch,
                "grid dimension " + std::to_string(grid.dim()) + " != " + std::to_string(d));
}

}  // namespace

ComplexField analytic_q_1d(const GridPtr& grid) {
  if (grid->dim() != 1) throw Error(ErrorKind::DimensionMismatch, "analytic profile is 1-D only");
  const double peak = std::pow(3.0, 0.25);
  return sample(grid, [&](double x, double) {
    return Complex(peak / std::sqrt(std::cosh(2.0 * x)), 0.0);
  });
}

double ground_state_residual(const ComplexField& q, int d) {
  const Grid& grid = *q.grid;
  require_dim(grid, d);
  const auto k2 = laplacian_symbol(grid);
  auto coeffs = to_spectral(q);
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] *= -k2[i];
  const auto lap = from_spectral(q.grid, std::move(coeffs));
  const double power = 1.0 + 4.0 / d;
  double sup = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const Complex z = q[i];
    const Complex defect = lap[i] - z + abs_pow_from_sq(std::norm(z), power - 1.0) * z;
    sup = std::max(sup, std::abs(defect));
  }
  return sup;
}

GroundState ground_state_from_profile(ComplexField q, int d) {
  require_dim(*q.grid, d);
  GroundState gs;
  gs.dim = d;
  gs.mass = mass(q);
  gs.grad_norm = grad_norm(q);
  gs.residual = ground_state_residual(q, d);
  gs.profile = std::move(q);
  return gs;
}

GroundState solve_ground_state(const GridPtr& grid, int d, const PetviashviliOptions& options) {
  require_dim(*grid, d);
  if (!(options.tol > 0.0) || options.tol > 1e-6)
    throw Error(ErrorKind::InvalidArgument, "tolerance must lie in (0, 1e-6]");

  const double q = 1.0 + 4.0 / d;
  const double gamma = q / (q - 1.0);
  const double vol = grid->cell_volume();
  const double inv_size = 1.0 / static_cast<double>(grid->size());
  const auto k2 = laplacian_symbol(*grid);
  const Fft fft(*grid);

  ComplexField iterate = options.seed ? *options.seed : sample(grid, [&](double x, double y) {
    const double w2 = options.seed_width * options.seed_width;
    return Complex(options.seed_amplitude * std::exp(-(x * x + y * y) / w2), 0.0);
  });
  if (*iterate.grid != *grid) throw Error(ErrorKind::DimensionMismatch, "seed lives on another grid");

  GroundState gs;
  gs.dim = d;
  std::vector<Complex> spec(grid->size());
  std::vector<Complex> nonlin(grid->size());
  double residual = ground_state_residual(iterate, d);
  gs.residual_history.push_back(residual);
  int it = 0;
  while (residual >= options.tol) {
    if (it == options.max_iter)
      throw Error(ErrorKind::NonConvergence, "Petviashvili residual " + std::to_string(residual) +
                                                 " above tolerance after " + std::to_string(it) +
                                                 " iterations");
    ++it;
    fft.forward(iterate.values, spec);
    double quad = 0.0;  // <(1 - Delta)Q, Q>
    for (std::size_t i = 0; i < spec.size(); ++i) quad += (1.0 + k2[i]) * std::norm(spec[i]);
    quad *= vol * inv_size;

    double cross = 0.0;  // <Q^q, Q>
    for (std::size_t i = 0; i < iterate.size(); ++i) {
      const double v = iterate[i].real();
      const double vq = abs_pow_from_sq(v * v, q);
      nonlin[i] = Complex(vq, 0.0);
      cross += vq * std::abs(v);
    }
    cross *= vol;
    if (!(cross > 0.0)) throw Error(ErrorKind::NumericalFailure, "iterate collapsed to zero");
    const double factor = std::pow(quad / cross, gamma);

    fft.forward(nonlin, nonlin);
    for (std::size_t i = 0; i < nonlin.size(); ++i) nonlin[i] *= factor / (1.0 + k2[i]);
    fft.inverse(nonlin, nonlin);

    double peak = 0.0;
    double lowest = 0.0;
    for (std::size_t i = 0; i < iterate.size(); ++i) {
      const double v = nonlin[i].real();
      iterate[i] = Complex(v, 0.0);
      peak = std::max(peak, v);
      lowest = std::min(lowest, v);
    }
    if (!std::isfinite(peak)) throw Error(ErrorKind::NumericalFailure, "Petviashvili iterate diverged");
    if (lowest < -1e-12 * peak)
      throw Error(ErrorKind::NegativePhase, "iterate lost positivity at iteration " + std::to_string(it));
    residual = ground_state_residual(iterate, d);
    gs.residual_history.push_back(residual);
  }

  // Far-tail samples sit at roundoff level and may carry either sign; only a
  // sign change above that level means a wrong branch.
  double peak = 0.0;
  for (const auto& z : iterate.values) peak = std::max(peak, z.real());
  for (auto& z : iterate.values) {
    if (z.real() < -1e-12 * peak) throw Error(ErrorKind::NegativePhase, "converged profile is not positive");
    z = Complex(std::abs(z.real()), 0.0);
  }

  gs.iterations = it;
  gs.residual = residual;
  gs.mass = mass(iterate);
  gs.grad_norm = grad_norm(iterate);
  gs.profile = std::move(iterate);
  return gs;
}

double sharp_gn_gap(const ComplexField& u, const GroundState& gs, const PhysParams& params) {
  if (gs.dim != params.dim()) throw Error(ErrorKind::DimensionMismatch, "ground state dimension");
  const double ratio = mass(u) / gs.mass;
  const double g2 = grad_norm_sq(u);
  return energy(u, params) - 0.5 * g2 * (1.0 - std::pow(ratio, 2.0 / params.dim()));
}

PohozaevReport pohozaev_report(const GroundState& gs, const PhysParams& params) {
  const double d = gs.dim;
  PohozaevReport r;
  r.grad_sq = gs.grad_norm * gs.grad_norm;
  r.potential = lp_norm_pow(gs.profile, 4.0 / d + 2.0);
  r.energy = energy(gs.profile, params);
  r.pohozaev_residual = r.grad_sq - d / (d + 2.0) * r.potential;
  r.multiplier_residual = r.grad_sq + gs.mass - r.potential;
  return r;
}

}  // namespace nlslab
