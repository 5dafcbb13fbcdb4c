#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace nlslab {

using Complex = std::complex<double>;

/// Periodic box [-L, L)^d sampled with N points per axis.
///
/// Samples are stored row-major; for d = 2 the flat index is i*N + j with i
/// running along the first axis. The wavenumber table follows FFT ordering:
/// entry m holds pi*m/L for m < N/2 and pi*(m-N)/L otherwise, so entry N/2 is
/// the Nyquist mode -pi*N/(2L).
class Grid {
public:
  Grid(int d, double half_width, std::size_t n);

  int dim() const noexcept { return d_; }
  double half_width() const noexcept { return half_width_; }
  std::size_t points_per_axis() const noexcept { return n_; }
  std::size_t size() const noexcept { return size_; }
  double dx() const noexcept { return dx_; }
  /// Volume element dx^d of the Riemann sum.
  double cell_volume() const noexcept { return cell_volume_; }

  std::span<const double> wavenumbers() const noexcept { return k_; }
  /// Coordinate of sample j along any axis, -L + j*dx.
  double coordinate(std::size_t j) const noexcept {
    return -half_width_ + static_cast<double>(j) * dx_;
  }
  std::size_t nyquist_index() const noexcept { return n_ / 2; }

  bool operator==(const Grid& other) const noexcept {
    return d_ == other.d_ && half_width_ == other.half_width_ && n_ == other.n_;
  }

private:
  int d_;
  double half_width_;
  std::size_t n_;
  std::size_t size_;
  double dx_;
  double cell_volume_;
  std::vector<double> k_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Validating factory. Rejects d outside {1,2}, L <= 0, and N that is not a
/// power of two >= 16.
GridPtr make_grid(int d, double half_width, std::size_t n);

/// Complex samples u(x) on a grid.
struct ComplexField {
  GridPtr grid;
  std::vector<Complex> values;

  ComplexField() = default;
  explicit ComplexField(GridPtr g) : grid(std::move(g)), values(grid->size()) {}
  ComplexField(GridPtr g, std::vector<Complex> v);

  std::size_t size() const noexcept { return values.size(); }
  Complex& operator[](std::size_t i) noexcept { return values[i]; }
  const Complex& operator[](std::size_t i) const noexcept { return values[i]; }

  bool all_finite() const noexcept;
};

/// Samples f at every grid point. For d = 1 f receives (x, 0).
template <typename F>
ComplexField sample(const GridPtr& grid, F&& f) {
  ComplexField u(grid);
  const std::size_t n = grid->points_per_axis();
  if (grid->dim() == 1) {
    for (std::size_t j = 0; j < n; ++j) u[j] = f(grid->coordinate(j), 0.0);
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const double x = grid->coordinate(i);
      for (std::size_t j = 0; j < n; ++j) u[i * n + j] = f(x, grid->coordinate(j));
    }
  }
  return u;
}

/// Squared radius |x|^2 of flat sample index idx.
double radius_squared(const Grid& grid, std::size_t idx) noexcept;

/// Physical parameters of iu_t + Delta u + s|u|^{4/d}u + ia|u|^p u = 0, with
/// s = +1 (focusing) or -1 (defocusing).
class PhysParams {
public:
  PhysParams(int d, double p, double a, bool focusing = true);

  int dim() const noexcept { return d_; }
  double damping_power() const noexcept { return p_; }
  double damping() const noexcept { return a_; }
  bool focusing() const noexcept { return focusing_; }
  double focusing_sign() const noexcept { return focusing_ ? 1.0 : -1.0; }
  /// Focusing exponent 4/d.
  double sigma() const noexcept { return 4.0 / d_; }
  /// (4 + 2d + pd) / (4 + 2d).
  double c_p() const noexcept { return (4.0 + 2.0 * d_ + p_ * d_) / (4.0 + 2.0 * d_); }
  /// True when p equals the focusing power 4/d.
  bool is_critical_damping() const noexcept { return p_ == sigma(); }

private:
  int d_;
  double p_;
  double a_;
  bool focusing_;
};

}  // namespace nlslab
