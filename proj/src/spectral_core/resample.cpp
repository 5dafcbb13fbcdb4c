#include "nlslab/resample.hpp"

#include <cmath>
#include <numbers>

#include "nlslab/fft.hpp"

namespace nlslab {

namespace {

// Fills row[m] = basis_m(y) for the trigonometric interpolant on the grid,
// with the Nyquist mode taken as its real (cosine) part.
void basis_row(const Grid& grid, double y, std::vector<Complex>& row) {
  const std::size_t n = grid.points_per_axis();
  const double L = grid.half_width();
  const double theta = std::numbers::pi * (y + L) / L;
  const Complex w = std::polar(1.0, theta);
  const Complex w_conj = std::conj(w);
  Complex pos(1.0, 0.0);
  Complex neg(1.0, 0.0);
  row[0] = pos;
  // Powers by recurrence, re-anchored periodically to bound drift.
  for (std::size_t m = 1; m < n / 2; ++m) {
    if (m % 64 == 0) {
      pos = std::polar(1.0, theta * static_cast<double>(m));
      neg = std::conj(pos);
    } else {
      pos *= w;
      neg *= w_conj;
    }
    row[m] = pos;
    row[n - m] = neg;
  }
  row[n / 2] = Complex(std::cos(theta * static_cast<double>(n / 2)), 0.0);
}

}  // namespace

ComplexField resample(const ComplexField& u, std::array<double, 2> center, double scale) {
  const Grid& grid = *u.grid;
  const std::size_t n = grid.points_per_axis();
  auto coeffs = to_spectral(u);
  const double norm = 1.0 / static_cast<double>(grid.size());
  for (auto& c : coeffs) c *= norm;

  ComplexField out(u.grid);
  std::vector<Complex> row(n);
  if (grid.dim() == 1) {
    for (std::size_t j = 0; j < n; ++j) {
      basis_row(grid, center[0] + scale * grid.coordinate(j), row);
      Complex acc(0.0, 0.0);
      for (std::size_t m = 0; m < n; ++m) acc += coeffs[m] * row[m];
      out[j] = acc;
    }
    return out;
  }

  // Contract the first axis, then the second.
  std::vector<Complex> partial(n * n, Complex(0.0, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    basis_row(grid, center[0] + scale * grid.coordinate(i), row);
    Complex* dst = partial.data() + i * n;
    for (std::size_t m1 = 0; m1 < n; ++m1) {
      const Complex e = row[m1];
      const Complex* src = coeffs.data() + m1 * n;
      for (std::size_t m2 = 0; m2 < n; ++m2) dst[m2] += e * src[m2];
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    basis_row(grid, center[1] + scale * grid.coordinate(j), row);
    for (std::size_t i = 0; i < n; ++i) {
      const Complex* src = partial.data() + i * n;
      Complex acc(0.0, 0.0);
      for (std::size_t m2 = 0; m2 < n; ++m2) acc += src[m2] * row[m2];
      out[i * n + j] = acc;
    }
  }
  return out;
}

}  // namespace nlslab
