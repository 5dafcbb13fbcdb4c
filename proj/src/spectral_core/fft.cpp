#include "nlslab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace nlslab {

struct Fft::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  ~Plans() {
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

namespace {

// The FFTW planner is not thread safe; plans are built under this lock and
// never mutated afterwards. FFTW_ESTIMATE keeps plan choice deterministic.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

auto& plan_cache() {
  static std::map<std::pair<int, std::size_t>, std::unique_ptr<Fft::Plans>> cache;
  return cache;
}

}  // namespace

Fft::Fft(const Grid& grid) : size_(grid.size()) {
  std::lock_guard lock(planner_mutex());
  auto& cache = plan_cache();
  const auto key = std::make_pair(grid.dim(), grid.points_per_axis());
  auto it = cache.find(key);
  if (it == cache.end()) {
    auto plans = std::make_unique<Plans>();
    const int n = static_cast<int>(grid.points_per_axis());
    auto* buf = fftw_alloc_complex(size_);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    if (grid.dim() == 1) {
      plans->forward = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, flags);
      plans->backward = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, flags);
    } else {
      plans->forward = fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD, flags);
      plans->backward = fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD, flags);
    }
    fftw_free(buf);
    it = cache.emplace(key, std::move(plans)).first;
  }
  plans_ = it->second.get();
}

// In-place plans were created, so in and out must be the same array: copy
// first when they differ.
void Fft::forward(std::span<const Complex> in, std::span<Complex> out) const {
  if (in.data() != out.data()) std::copy(in.begin(), in.end(), out.begin());
  auto* p = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(plans_->forward, p, p);
}

void Fft::inverse(std::span<const Complex> in, std::span<Complex> out) const {
  if (in.data() != out.data()) std::copy(in.begin(), in.end(), out.begin());
  auto* p = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(plans_->backward, p, p);
  const double scale = 1.0 / static_cast<double>(size_);
  for (auto& z : out) z *= scale;
}

std::vector<Complex> to_spectral(const ComplexField& u) {
  std::vector<Complex> coeffs(u.values);
  Fft(*u.grid).forward(coeffs, coeffs);
  return coeffs;
}

ComplexField from_spectral(const GridPtr& grid, std::vector<Complex> coeffs) {
  Fft(*grid).inverse(coeffs, coeffs);
  return ComplexField(grid, std::move(coeffs));
}

}  // namespace nlslab
