#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nlslab/diagnostics.hpp"
#include "nlslab/error.hpp"
#include "nlslab/functionals.hpp"
#include "nlslab/ground_state.hpp"
#include "oracles.hpp"

using namespace nlslab;
using std::numbers::pi;

namespace {

const double kMassQ1 = std::sqrt(3.0) * pi / 2.0;

const GroundState& townes_256() {
  static const GroundState gs = [] {
    PetviashviliOptions opt;
    opt.tol = 1e-9;
    return solve_ground_state(make_grid(2, 12.0, 256), 2, opt);
  }();
  return gs;
}

const GroundState& townes_512() {
  static const GroundState gs = [] {
    PetviashviliOptions opt;
    opt.tol = 1e-9;
    return solve_ground_state(make_grid(2, 12.0, 512), 2, opt);
  }();
  return gs;
}

}  // namespace

TEST_CASE("radial shooting oracle is self-consistent") {
  const auto a = oracle::townes_by_shooting(2e-4);
  const auto b = oracle::townes_by_shooting(1e-4);
  CHECK(a.q0 == doctest::Approx(b.q0).epsilon(1e-9));
  CHECK(a.mass == doctest::Approx(b.mass).epsilon(1e-6));
  CHECK(a.q0 > 2.0);
  CHECK(a.q0 < 2.5);
}

TEST_CASE("closed-form 1-D profile") {
  auto g = make_grid(1, 20.0, 2048);
  auto q = analytic_q_1d(g);
  CHECK(q[1024].real() == doctest::Approx(std::pow(3.0, 0.25)).epsilon(1e-15));
  CHECK(std::pow(3.0, 0.25) == doctest::Approx(1.3160740).epsilon(1e-7));
  CHECK(mass(q) == doctest::Approx(kMassQ1).epsilon(1e-10));
  CHECK(kMassQ1 == doctest::Approx(2.7206990).epsilon(1e-7));
  // On L = 20 the periodic wrap of the sech^{1/2} tail limits the residual;
  // a wider box shows the truncation-only value.
  CHECK(ground_state_residual(analytic_q_1d(make_grid(1, 30.0, 2048)), 1) < 1e-9);
  CHECK_THROWS_AS(analytic_q_1d(make_grid(2, 10.0, 32)), Error);
}

TEST_CASE("Petviashvili, d = 1") {
  PetviashviliOptions opt;
  opt.tol = 1e-10;
  auto gs = solve_ground_state(make_grid(1, 20.0, 2048), 1, opt);
  CHECK(std::abs(gs.mass - kMassQ1) < 1e-6);
  CHECK(gs.residual < 1e-10);
  CHECK(std::abs(energy(gs.profile, PhysParams(1, 1.0, 0.0))) < 1e-8);
  CHECK(gs.grad_norm > 0.0);
  CHECK(std::isfinite(gs.grad_norm));

  const std::size_t n = 2048;
  double asym = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    CHECK(gs.profile[j].real() > 0.0);
    CHECK(gs.profile[j].imag() == 0.0);
    if (j > 0) asym = std::max(asym, std::abs(gs.profile[j] - gs.profile[n - j]));
  }
  CHECK(asym < 1e-8);

  SUBCASE("residual decreases after the transient") {
    const auto& h = gs.residual_history;
    REQUIRE(h.size() > 6);
    for (std::size_t i = 6; i < h.size(); ++i) CHECK(h[i] <= h[i - 1]);
  }

  SUBCASE("grid convergence") {
    auto coarse = solve_ground_state(make_grid(1, 20.0, 1024), 1, opt);
    CHECK(std::abs(coarse.mass - gs.mass) / gs.mass < 1e-8);
  }
}

TEST_CASE("exact profile as seed is already a fixed point") {
  auto g = make_grid(1, 30.0, 2048);
  PetviashviliOptions opt;
  opt.tol = 1e-9;
  opt.seed = analytic_q_1d(g);
  auto gs = solve_ground_state(g, 1, opt);
  CHECK(gs.iterations <= 3);
  CHECK(gs.mass == doctest::Approx(kMassQ1).epsilon(1e-10));
}

TEST_CASE("solver errors") {
  auto g = make_grid(1, 20.0, 512);
  PetviashviliOptions opt;
  opt.tol = 1e-14;
  opt.max_iter = 3;
  try {
    solve_ground_state(g, 1, opt);
    FAIL("expected NonConvergence");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonConvergence);
  }
  CHECK_THROWS_AS(solve_ground_state(g, 2), Error);
}

TEST_CASE("Townes profile against the shooting oracle") {
  const auto ref = oracle::townes_by_shooting();
  const auto& gs = townes_512();
  CHECK(gs.residual < 1e-9);
  CHECK(std::abs(gs.mass - ref.mass) / ref.mass < 1e-3);
  CHECK(gs.profile[256 * 512 + 256].real() == doctest::Approx(ref.q0).epsilon(1e-3));
  MESSAGE("Townes mass: Petviashvili " << gs.mass << ", shooting " << ref.mass);

  // Radial symmetry on the lattice: reflections and the diagonal swap.
  double asym = 0.0;
  const std::size_t n = 512;
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 1; j < n; ++j) {
      const auto v = gs.profile[i * n + j];
      asym = std::max(asym, std::abs(v - gs.profile[j * n + i]));
      asym = std::max(asym, std::abs(v - gs.profile[(n - i) * n + j]));
    }
  CHECK(asym < 1e-8);

  const auto rep = pohozaev_report(gs, PhysParams(2, 1.0, 0.0));
  CHECK(std::abs(rep.energy) < 1e-6);
  CHECK(std::abs(townes_256().mass - gs.mass) / gs.mass < 1e-5);
}

TEST_CASE("Pohozaev identities, d = 1") {
  auto gs = ground_state_from_profile(analytic_q_1d(make_grid(1, 30.0, 2048)), 1);
  const auto rep = pohozaev_report(gs, PhysParams(1, 1.0, 0.0));
  const double q6 = std::pow(3.0, 1.5) * pi / 4.0;
  CHECK(rep.potential == doctest::Approx(q6).epsilon(1e-10));
  CHECK(rep.grad_sq == doctest::Approx(q6 / 3.0).epsilon(1e-10));
  // Quadrature cross-check of int Q^6 = 3^{3/2} int sech^3(2x).
  const double quad = oracle::simpson([](double x) { return std::pow(3.0, 1.5) * std::pow(1.0 / std::cosh(2.0 * x), 3); },
                                      -30.0, 30.0, 200000);
  CHECK(quad == doctest::Approx(q6).epsilon(1e-12));
  CHECK(std::abs(rep.energy) < 1e-8);
  CHECK(std::abs(rep.pohozaev_residual) < 1e-8);
  CHECK(std::abs(rep.multiplier_residual) < 1e-8);
}

TEST_CASE("sharp Gagliardo-Nirenberg gap") {
  PetviashviliOptions opt;
  auto gs = solve_ground_state(make_grid(1, 20.0, 1024), 1, opt);
  PhysParams pp(1, 1.0, 0.0);
  CHECK(sharp_gn_gap(ComplexField(gs.profile.grid), gs, pp) == 0.0);
  CHECK(std::abs(sharp_gn_gap(gs.profile, gs, pp)) < 1e-7);

  std::mt19937_64 rng(2024);
  double worst = 1e300;
  for (int i = 0; i < 200; ++i) worst = std::min(worst, sharp_gn_gap(random_smooth_field(gs.profile.grid, rng), gs, pp));
  CHECK(worst >= -1e-8);

  SUBCASE("d = 2") {
    const auto& t = townes_256();
    PhysParams p2(2, 1.0, 0.0);
    CHECK(std::abs(sharp_gn_gap(t.profile, t, p2)) < 1e-6);
    std::mt19937_64 rng2(7);
    double w2 = 1e300;
    for (int i = 0; i < 200; ++i) w2 = std::min(w2, sharp_gn_gap(random_smooth_field(t.profile.grid, rng2), t, p2));
    CHECK(w2 >= -1e-8);
  }
}
