#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nlslab/grid.hpp"

namespace nlslab {

/// Unnormalized forward / normalized inverse DFT over a whole grid.
///
/// Plans are created once per (d, N) under a global lock and shared
/// read-only afterwards; execution on caller-owned arrays is thread safe.
class Fft {
public:
  explicit Fft(const Grid& grid);

  /// out may alias in.
  void forward(std::span<const Complex> in, std::span<Complex> out) const;
  /// Includes the 1/N^d factor. out may alias in.
  void inverse(std::span<const Complex> in, std::span<Complex> out) const;

  std::size_t size() const noexcept { return size_; }

  struct Plans;

private:
  const Plans* plans_;
  std::size_t size_;
};

/// Spectral coefficients of u (unnormalized forward transform).
std::vector<Complex> to_spectral(const ComplexField& u);
/// Field from spectral coefficients produced by to_spectral.
ComplexField from_spectral(const GridPtr& grid, std::vector<Complex> coeffs);

/// Calls f(flat_index, kx, ky) over the spectral grid; ky = 0 for d = 1.
template <typename F>
void for_each_mode(const Grid& grid, F&& f) {
  const auto k = grid.wavenumbers();
  const std::size_t n = grid.points_per_axis();
  if (grid.dim() == 1) {
    for (std::size_t m = 0; m < n; ++m) f(m, k[m], 0.0);
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) f(i * n + j, k[i], k[j]);
  }
}

}  // namespace nlslab
