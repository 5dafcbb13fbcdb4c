#include "nlslab/snapshot_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "nlslab/error.hpp"

namespace nlslab {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'N', 'L', 'S', 'F'};
constexpr std::size_t kHeaderSize = 4 + 4 + 1 + 8 + 8;

template <typename T>
void put(std::vector<char>& buf, T value) {
  const auto* p = reinterpret_cast<const char*>(&value);
  buf.insert(buf.end(), p, p + sizeof(T));
}

template <typename T>
T get(const std::vector<char>& buf, std::size_t& pos) {
  T value;
  std::memcpy(&value, buf.data() + pos, sizeof(T));
  pos += sizeof(T);
  return value;
}

}  // namespace

void write_snapshot(const ComplexField& u, const std::filesystem::path& path) {
  const Grid& grid = *u.grid;
  std::vector<char> buf;
  buf.reserve(kHeaderSize + u.size() * 16);
  buf.insert(buf.end(), kMagic, kMagic + 4);
  put<std::uint32_t>(buf, kSnapshotVersion);
  put<std::uint8_t>(buf, static_cast<std::uint8_t>(grid.dim()));
  put<std::uint64_t>(buf, grid.points_per_axis());
  put<double>(buf, grid.half_width());
  for (const auto& z : u.values) {
    put<double>(buf, z.real());
    put<double>(buf, z.imag());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

ComplexField read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  const std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 4 || std::memcmp(buf.data(), kMagic, 4) != 0)
    throw Error(ErrorKind::BadMagic, path.string() + ": not a field snapshot");
  if (buf.size() < kHeaderSize) throw Error(ErrorKind::TruncatedFile, path.string() + ": header truncated");
  std::size_t pos = 4;
  const auto version = get<std::uint32_t>(buf, pos);
  if (version != kSnapshotVersion)
    throw Error(ErrorKind::VersionMismatch, path.string() + ": version " + std::to_string(version));
  const int d = get<std::uint8_t>(buf, pos);
  const auto n = get<std::uint64_t>(buf, pos);
  const double l = get<double>(buf, pos);
  GridPtr grid;
  try {
    grid = make_grid(d, l, static_cast<std::size_t>(n));
  } catch (const Error& e) {
    throw Error(ErrorKind::InvalidArgument, path.string() + ": bad header: " + e.what());
  }
  const std::size_t expected = kHeaderSize + grid->size() * 16;
  if (buf.size() < expected) throw Error(ErrorKind::TruncatedFile, path.string() + ": sample data truncated");
  ComplexField u(grid);
  for (auto& z : u.values) {
    const double re = get<double>(buf, pos);
    const double im = get<double>(buf, pos);
    z = Complex(re, im);
  }
  return u;
}

ComplexField read_snapshot(const std::filesystem::path& path, int expected_dim) {
  ComplexField u = read_snapshot(path);
  if (u.grid->dim() != expected_dim)
    throw Error(ErrorKind::DimensionMismatch, path.string() + ": stored field is " + std::to_string(u.grid->dim()) +
                                                  "-D, expected " + std::to_string(expected_dim) + "-D");
  return u;
}

}  // namespace nlslab
