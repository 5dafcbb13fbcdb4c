#pragma once

#include <filesystem>

#include "nlslab/grid.hpp"

namespace nlslab {

// Binary field format, little-endian throughout:
//   "NLSF" | u32 version (1) | u8 d | u64 N | f64 L | N^d x (f64 re, f64 im)
// with samples in row-major order.

inline constexpr std::uint32_t kSnapshotVersion = 1;

void write_snapshot(const ComplexField& u, const std::filesystem::path& path);

/// Throws BadMagic, VersionMismatch, TruncatedFile, or Io.
ComplexField read_snapshot(const std::filesystem::path& path);

/// As above, and DimensionMismatch when the stored d differs from expected_dim.
ComplexField read_snapshot(const std::filesystem::path& path, int expected_dim);

}  // namespace nlslab
