#include "nlslab/grid.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "nlslab/error.hpp"

namespace nlslab {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::NegativePhase: return "NegativePhase";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::InsufficientRecords: return "InsufficientRecords";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::InsufficientCrossings: return "InsufficientCrossings";
    case ErrorKind::DegenerateFit: return "DegenerateFit";
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::EmptyFamily: return "EmptyFamily";
    case ErrorKind::BadMagic: return "BadMagic";
    case ErrorKind::VersionMismatch: return "VersionMismatch";
    case ErrorKind::TruncatedFile: return "TruncatedFile";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

Grid::Grid(int d, double half_width, std::size_t n)
    : d_(d), half_width_(half_width), n_(n), size_(d == 1 ? n : n * n),
      dx_(2.0 * half_width / static_cast<double>(n)),
      cell_volume_(d == 1 ? dx_ : dx_ * dx_), k_(n) {
  const auto half = static_cast<std::ptrdiff_t>(n / 2);
  for (std::size_t m = 0; m < n; ++m) {
    auto signed_m = static_cast<std::ptrdiff_t>(m);
    if (signed_m >= half) signed_m -= static_cast<std::ptrdiff_t>(n);
    k_[m] = std::numbers::pi * static_cast<double>(signed_m) / half_width;
  }
}

GridPtr make_grid(int d, double half_width, std::size_t n) {
  if (d != 1 && d != 2)
    throw Error(ErrorKind::InvalidArgument, "dimension must be 1 or 2, got " + std::to_string(d));
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw Error(ErrorKind::InvalidArgument, "half-width L must be positive");
  if (n < 16 || !std::has_single_bit(n))
    throw Error(ErrorKind::InvalidArgument,
                "points per axis must be a power of two >= 16, got " + std::to_string(n));
  return std::make_shared<const Grid>(d, half_width, n);
}

ComplexField::ComplexField(GridPtr g, std::vector<Complex> v)
    : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid->size())
    throw Error(ErrorKind::DimensionMismatch, "sample count does not match grid");
}

bool ComplexField::all_finite() const noexcept {
  for (const auto& z : values)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

double radius_squared(const Grid& grid, std::size_t idx) noexcept {
  if (grid.dim() == 1) {
    const double x = grid.coordinate(idx);
    return x * x;
  }
  const std::size_t n = grid.points_per_axis();
  const double x = grid.coordinate(idx / n);
  const double y = grid.coordinate(idx % n);
  return x * x + y * y;
}

PhysParams::PhysParams(int d, double p, double a, bool focusing)
    : d_(d), p_(p), a_(a), focusing_(focusing) {
  if (d != 1 && d != 2) throw Error(ErrorKind::InvalidArgument, "dimension must be 1 or 2");
  if (!std::isfinite(p) || p < 1.0)
    throw Error(ErrorKind::InvalidArgument, "damping power must satisfy p >= 1");
  if (!std::isfinite(a) || a < 0.0)
    throw Error(ErrorKind::InvalidArgument, "damping coefficient must satisfy a >= 0");
}

}  // namespace nlslab
