#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nlslab/error.hpp"
#include "nlslab/fft.hpp"
#include "nlslab/functionals.hpp"
#include "nlslab/ground_state.hpp"
#include "nlslab/resample.hpp"

using namespace nlslab;
using std::numbers::pi;

namespace {

double sup_diff(const ComplexField& a, const ComplexField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Random trigonometric polynomial using only the lowest `modes` wavenumbers.
ComplexField band_limited(const GridPtr& g, std::mt19937_64& rng, int modes) {
  std::normal_distribution<double> nd;
  std::vector<Complex> c(g->size(), Complex(0.0, 0.0));
  const auto n = static_cast<long>(g->points_per_axis());
  auto wrap = [n](long m) { return static_cast<std::size_t>((m + n) % n); };
  if (g->dim() == 1) {
    for (long m = -modes; m <= modes; ++m) c[wrap(m)] = Complex(nd(rng), nd(rng));
  } else {
    for (long i = -modes; i <= modes; ++i)
      for (long j = -modes; j <= modes; ++j)
        c[wrap(i) * g->points_per_axis() + wrap(j)] = Complex(nd(rng), nd(rng));
  }
  return from_spectral(g, std::move(c));
}

}  // namespace

TEST_CASE("grid construction") {
  auto g = make_grid(1, 20.0, 1024);
  CHECK(g->dx() == doctest::Approx(0.0390625).epsilon(1e-15));
  CHECK(g->size() == 1024);
  CHECK(g->dx() * 1024 == doctest::Approx(40.0));

  auto g2 = make_grid(2, 10.0, 256);
  CHECK(g2->size() == 65536);

  CHECK_THROWS_AS(make_grid(1, 20.0, 1000), Error);
  CHECK_THROWS_AS(make_grid(1, 0.0, 1024), Error);
  CHECK_THROWS_AS(make_grid(1, -1.0, 1024), Error);
  CHECK_THROWS_AS(make_grid(3, 1.0, 16), Error);
  CHECK_THROWS_AS(make_grid(1, 1.0, 8), Error);
  try {
    make_grid(1, 20.0, 1000);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidArgument);
  }
}

TEST_CASE("wavenumber table is antisymmetric below Nyquist") {
  auto g = make_grid(1, 5.0, 64);
  const auto k = g->wavenumbers();
  for (std::size_t m = 1; m < 32; ++m) CHECK(k[m] == doctest::Approx(-k[64 - m]).epsilon(1e-15));
  CHECK(k[0] == 0.0);
  CHECK(k[32] == doctest::Approx(-pi * 32 / 5.0));
}

TEST_CASE("gradient") {
  auto g = make_grid(1, 20.0, 1024);

  SUBCASE("constant has zero gradient") {
    auto u = sample(g, [](double, double) { return Complex(2.5, -1.0); });
    auto grad = gradient(u);
    REQUIRE(grad.size() == 1);
    for (const auto& z : grad[0].values) CHECK(std::abs(z) < 1e-13);
  }

  SUBCASE("plane wave is an eigenfunction") {
    const double k0 = pi * 7 / 20.0;
    auto u = sample(g, [&](double x, double) { return std::polar(1.0, k0 * x); });
    auto grad = gradient(u);
    double err = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
      err = std::max(err, std::abs(grad[0][i] - Complex(0.0, k0) * u[i]));
    CHECK(err < 1e-12);
  }

  SUBCASE("Gaussian derivative") {
    auto u = sample(g, [](double x, double) { return Complex(std::exp(-x * x), 0.0); });
    auto grad = gradient(u);
    auto exact = sample(g, [](double x, double) { return Complex(-2.0 * x * std::exp(-x * x), 0.0); });
    CHECK(sup_diff(grad[0], exact) < 1e-10);
  }

  SUBCASE("linearity") {
    std::mt19937_64 rng(3);
    auto u = band_limited(g, rng, 40);
    auto v = band_limited(g, rng, 40);
    const Complex al(0.7, -0.2), be(-1.3, 0.5);
    ComplexField w(g);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = al * u[i] + be * v[i];
    auto gu = gradient(u), gv = gradient(v), gw = gradient(w);
    double err = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
      err = std::max(err, std::abs(gw[0][i] - (al * gu[0][i] + be * gv[0][i])));
    CHECK(err < 1e-12);
  }

  SUBCASE("two dimensions, separable Gaussian") {
    auto g2 = make_grid(2, 8.0, 128);
    auto u = sample(g2, [](double x, double y) { return Complex(std::exp(-x * x - 2.0 * y * y), 0.0); });
    auto grad = gradient(u);
    REQUIRE(grad.size() == 2);
    auto ex = sample(g2, [](double x, double y) { return Complex(-2.0 * x * std::exp(-x * x - 2.0 * y * y), 0.0); });
    auto ey = sample(g2, [](double x, double y) { return Complex(-4.0 * y * std::exp(-x * x - 2.0 * y * y), 0.0); });
    CHECK(sup_diff(grad[0], ex) < 1e-10);
    CHECK(sup_diff(grad[1], ey) < 1e-10);
  }
}

TEST_CASE("mass") {
  auto g = make_grid(1, 20.0, 1024);
  CHECK(mass(ComplexField(g)) == 0.0);
  auto gauss = sample(g, [](double x, double) { return Complex(std::exp(-x * x), 0.0); });
  CHECK(mass(gauss) == doctest::Approx(std::sqrt(pi / 2.0)).epsilon(1e-12));
  auto q = analytic_q_1d(make_grid(1, 20.0, 2048));
  CHECK(mass(q) == doctest::Approx(std::sqrt(3.0) * pi / 2.0).epsilon(1e-9));
}

TEST_CASE("Parseval") {
  std::mt19937_64 rng(11);
  for (int d : {1, 2}) {
    auto g = make_grid(d, 6.0, d == 1 ? 256 : 64);
    auto u = band_limited(g, rng, d == 1 ? 60 : 15);
    const auto c = to_spectral(u);
    long double s = 0.0L;
    for (const auto& z : c) s += std::norm(z);
    const double n_total = static_cast<double>(g->size());
    const double spectral = static_cast<double>(s) * g->cell_volume() / n_total;
    CHECK(mass(u) == doctest::Approx(spectral).epsilon(1e-12));
  }
}

TEST_CASE("energy") {
  PhysParams p1(1, 1.0, 0.0);
  auto g = make_grid(1, 20.0, 1024);
  CHECK(energy(ComplexField(g), p1) == 0.0);
  auto gauss = sample(g, [](double x, double) { return Complex(std::exp(-x * x), 0.0); });
  const double expect = 0.5 * std::sqrt(pi / 2.0) - std::sqrt(pi / 6.0) / 6.0;
  CHECK(expect == doctest::Approx(0.5060569).epsilon(1e-7));
  CHECK(energy(gauss, p1) == doctest::Approx(expect).epsilon(1e-12));

  auto q = analytic_q_1d(make_grid(1, 20.0, 2048));
  CHECK(std::abs(energy(q, p1)) < 1e-8);

  // Coefficient d/(4+2d) = 1/4 in two dimensions.
  PhysParams p2(2, 1.0, 0.0);
  auto g2 = make_grid(2, 8.0, 128);
  auto u2 = sample(g2, [](double x, double y) { return Complex(std::exp(-x * x - y * y), 0.0); });
  // |grad u|^2 integrates to pi, |u|^4 to pi/4.
  CHECK(energy(u2, p2) == doctest::Approx(0.5 * pi - 0.25 * 0.25 * pi).epsilon(1e-10));
}

TEST_CASE("L2-critical scaling leaves mass invariant") {
  auto g = make_grid(1, 20.0, 2048);
  for (double lam : {0.5, 2.0, 3.0}) {
    auto u = sample(g, [&](double x, double) {
      const double y = lam * x;
      return std::sqrt(lam) * Complex(std::exp(-y * y), 0.3 * std::exp(-y * y) * y);
    });
    auto ref = sample(g, [](double x, double) { return Complex(std::exp(-x * x), 0.3 * std::exp(-x * x) * x); });
    CHECK(mass(u) == doctest::Approx(mass(ref)).epsilon(1e-8));
    // The critical potential term scales like the kinetic one: E(u_lam) = lam^2 E(u).
    PhysParams pp(1, 1.0, 0.0);
    CHECK(energy(u, pp) == doctest::Approx(lam * lam * energy(ref, pp)).epsilon(1e-8));
  }
}

TEST_CASE("momentum") {
  auto g = make_grid(1, 20.0, 1024);
  auto real = sample(g, [](double x, double) { return Complex(std::exp(-x * x) * (1.0 + x), 0.0); });
  CHECK(std::abs(momentum(real)[0]) < 1e-14);

  auto boosted = sample(g, [](double x, double) { return std::exp(-x * x) * std::polar(1.0, 2.0 * x); });
  CHECK(momentum(boosted)[0] == doctest::Approx(2.0 * std::sqrt(pi / 2.0)).epsilon(1e-10));

  auto q = analytic_q_1d(make_grid(1, 20.0, 2048));
  CHECK(std::abs(momentum(q)[0]) < 1e-12);

  std::mt19937_64 rng(5);
  auto u = band_limited(g, rng, 50);
  ComplexField ubar(g);
  for (std::size_t i = 0; i < u.size(); ++i) ubar[i] = std::conj(u[i]);
  // Equal up to FFT roundoff.
  CHECK(std::abs(momentum(ubar)[0] + momentum(u)[0]) < 1e-14 * mass(u));
}

TEST_CASE("lp_norm_pow") {
  auto g = make_grid(1, 20.0, 1024);
  CHECK(lp_norm_pow(ComplexField(g), 3.0) == 0.0);
  CHECK(lp_norm_pow(ComplexField(g), 2.5) == 0.0);
  auto gauss = sample(g, [](double x, double) { return Complex(std::exp(-x * x), 0.0); });
  CHECK(lp_norm_pow(gauss, 6.0) == doctest::Approx(std::sqrt(pi / 6.0)).epsilon(1e-12));
  CHECK(lp_norm_pow(gauss, 2.5) == doctest::Approx(std::sqrt(pi / 2.5)).epsilon(1e-12));
  auto one = sample(g, [](double, double) { return Complex(1.0, 0.0); });
  CHECK(lp_norm_pow(one, 3.0) == doctest::Approx(40.0).epsilon(1e-14));
}

TEST_CASE("integer and fractional powers agree") {
  for (double rho : {1e-6, 0.3, 1.0, 7.5}) {
    for (double q : {1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, -1.0, -2.0}) {
      const double ref = std::pow(std::sqrt(rho), q);
      CHECK(abs_pow_from_sq(rho, q) == doctest::Approx(ref).epsilon(1e-14));
    }
  }
  CHECK(abs_pow_from_sq(0.0, 2.5) == 0.0);
  CHECK(abs_pow_from_sq(0.0, -1.0) == 0.0);
}

TEST_CASE("resample is exact for band-limited fields") {
  auto g = make_grid(1, 10.0, 128);
  std::mt19937_64 rng(9);
  auto u = band_limited(g, rng, 10);
  // Identity map.
  CHECK(sup_diff(resample(u, {0.0, 0.0}, 1.0), u) < 1e-12);
  // Shift by one grid cell is a lattice translation.
  auto shifted = resample(u, {g->dx(), 0.0}, 1.0);
  for (std::size_t j = 0; j + 1 < 128; ++j) CHECK(std::abs(shifted[j] - u[j + 1]) < 1e-12);
}
