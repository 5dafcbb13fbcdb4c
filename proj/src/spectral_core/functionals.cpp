#include "nlslab/functionals.hpp"

#include <algorithm>

#include "nlslab/fft.hpp"

namespace nlslab {

namespace {

// Derivative multiplier along one axis: i*k with the Nyquist mode removed.
double derivative_k(const Grid& grid, std::size_t m) {
  return m == grid.nyquist_index() ? 0.0 : grid.wavenumbers()[m];
}

}  // namespace

std::vector<ComplexField> gradient(const ComplexField& u) {
  const Grid& grid = *u.grid;
  const std::size_t n = grid.points_per_axis();
  const auto coeffs = to_spectral(u);
  const Fft fft(grid);
  std::vector<ComplexField> out;
  out.reserve(static_cast<std::size_t>(grid.dim()));
  for (int axis = 0; axis < grid.dim(); ++axis) {
    std::vector<Complex> d(coeffs.size());
    for (std::size_t idx = 0; idx < coeffs.size(); ++idx) {
      const std::size_t m = grid.dim() == 1 ? idx : (axis == 0 ? idx / n : idx % n);
      d[idx] = Complex(0.0, derivative_k(grid, m)) * coeffs[idx];
    }
    fft.inverse(d, d);
    out.emplace_back(u.grid, std::move(d));
  }
  return out;
}

double mass(const ComplexField& u) {
  long double sum = 0.0L;
  for (const auto& z : u.values) sum += std::norm(z);
  return static_cast<double>(sum * u.grid->cell_volume());
}

double grad_norm_sq(const ComplexField& u) {
  const Grid& grid = *u.grid;
  const std::size_t n = grid.points_per_axis();
  const auto coeffs = to_spectral(u);
  double sum = 0.0;
  for (std::size_t idx = 0; idx < coeffs.size(); ++idx) {
    double k2;
    if (grid.dim() == 1) {
      const double k = derivative_k(grid, idx);
      k2 = k * k;
    } else {
      const double kx = derivative_k(grid, idx / n);
      const double ky = derivative_k(grid, idx % n);
      k2 = kx * kx + ky * ky;
    }
    sum += k2 * std::norm(coeffs[idx]);
  }
  return sum * grid.cell_volume() / static_cast<double>(grid.size());
}

double lp_norm_pow(const ComplexField& u, double q) {
  long double sum = 0.0L;
  for (const auto& z : u.values) sum += abs_pow_from_sq(std::norm(z), q);
  return static_cast<double>(sum * u.grid->cell_volume());
}

double energy(const ComplexField& u, const PhysParams& params) {
  const double d = params.dim();
  const double potential = lp_norm_pow(u, params.sigma() + 2.0);
  return 0.5 * grad_norm_sq(u) - params.focusing_sign() * d / (4.0 + 2.0 * d) * potential;
}

std::vector<double> momentum(const ComplexField& u) {
  // Parseval: Im sum (ik u^)(u^)* / N^d = sum k |u^|^2 / N^d.
  const Grid& grid = *u.grid;
  const std::size_t n = grid.points_per_axis();
  const auto coeffs = to_spectral(u);
  std::vector<double> p(static_cast<std::size_t>(grid.dim()), 0.0);
  for (std::size_t idx = 0; idx < coeffs.size(); ++idx) {
    const double w = std::norm(coeffs[idx]);
    if (grid.dim() == 1) {
      p[0] += derivative_k(grid, idx) * w;
    } else {
      p[0] += derivative_k(grid, idx / n) * w;
      p[1] += derivative_k(grid, idx % n) * w;
    }
  }
  const double scale = grid.cell_volume() / static_cast<double>(grid.size());
  for (auto& c : p) c *= scale;
  return p;
}

double max_amplitude(const ComplexField& u) {
  double m = 0.0;
  for (const auto& z : u.values) m = std::max(m, std::norm(z));
  return std::sqrt(m);
}

}  // namespace nlslab
