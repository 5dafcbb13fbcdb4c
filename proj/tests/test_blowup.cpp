#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nlslab/blowup.hpp"
#include "nlslab/error.hpp"
#include "nlslab/functionals.hpp"
#include "nlslab/ground_state.hpp"

using namespace nlslab;

namespace {

struct Series {
  std::vector<double> t, g;
};

// g(t) = (T - t)^{-beta} on n uniform times in [t0, t1].
Series power_law(double beta, double T, double t0, double t1, int n, double noise = 0.0, unsigned seed = 1) {
  Series s;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  for (int i = 0; i < n; ++i) {
    const double t = t0 + (t1 - t0) * i / (n - 1);
    s.t.push_back(t);
    s.g.push_back(std::pow(T - t, -beta) * (1.0 + noise * nd(rng)));
  }
  return s;
}

// Samples geometrically dense toward T: T - t from tau0 down to tau1.
Series geometric(const std::function<double(double)>& g_of_tau, double T, double tau0, double tau1, int n) {
  Series s;
  for (int i = 0; i < n; ++i) {
    const double tau = tau0 * std::pow(tau1 / tau0, static_cast<double>(i) / (n - 1));
    s.t.push_back(T - tau);
    s.g.push_back(g_of_tau(tau));
  }
  return s;
}

double loglog_law(double tau) { return std::sqrt(std::log(std::abs(std::log(tau))) / tau); }

const GroundState& gs1024() {
  static const GroundState gs = solve_ground_state(make_grid(1, 20.0, 1024), 1);
  return gs;
}

ComplexField shifted(const ComplexField& u, std::size_t m, double phase) {
  ComplexField v(u.grid);
  const std::size_t n = u.size();
  for (std::size_t j = 0; j < n; ++j) v[j] = u[(j + m) % n] * std::polar(1.0, phase);
  return v;
}

}  // namespace

TEST_CASE("lambda series") {
  auto ls = lambda_series({0.0, 1.0, 2.0}, {2.0, 4.0, 8.0}, 2.0);
  CHECK(ls.lambda == std::vector<double>{1.0, 0.5, 0.25});
  // Doubling the gradient halves lambda pointwise.
  auto ls2 = lambda_series({0.0, 1.0, 2.0}, {4.0, 8.0, 16.0}, 2.0);
  for (std::size_t i = 0; i < 3; ++i) CHECK(ls2.lambda[i] == 0.5 * ls.lambda[i]);
  // Crossings interpolate in log lambda.
  REQUIRE(ls.crossing_k == std::vector<int>{1, 2});
  CHECK(ls.crossing_times[0] == doctest::Approx(1.0));
  CHECK(ls.crossing_times[1] == doctest::Approx(2.0));
  auto ls3 = lambda_series({0.0, 1.0}, {1.0, 4.0}, 1.0);
  REQUIRE(ls3.crossing_k.size() == 2);
  CHECK(ls3.crossing_times[0] == doctest::Approx(0.5));
}

TEST_CASE("power-law fit, clean synthetic data") {
  for (double beta : {0.5, 0.75, 1.0}) {
    CAPTURE(beta);
    auto s = power_law(beta, 1.0, 0.5, 0.99, 400);
    const auto fit = fit_power_law(lambda_series(s.t, s.g));
    CHECK(std::abs(fit.t_hat - 1.0) < 1e-4);
    CHECK(std::abs(fit.beta_hat - beta) < 1e-3);
    CHECK(fit.t_hat > fit.t_b);
    CHECK(fit.t_a >= 0.5);
    CHECK(fit.t_b <= 0.99);
    CHECK(fit.last - fit.first + 1 >= 30);
  }
}

TEST_CASE("power-law fit, 1% noise") {
  for (double beta : {0.5, 0.75, 1.0}) {
    CAPTURE(beta);
    auto s = power_law(beta, 1.0, 0.5, 0.99, 400, 0.01, 7);
    const auto fit = fit_power_law(lambda_series(s.t, s.g));
    CHECK(std::abs(fit.t_hat - 1.0) < 1e-2);
    CHECK(std::abs(fit.beta_hat - beta) < 1e-2);
  }
}

TEST_CASE("fit errors") {
  auto s = power_law(0.5, 1.0, 0.5, 0.99, 50);
  try {
    fit_power_law(lambda_series(s.t, s.g));
    FAIL("expected InsufficientData");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InsufficientData);
  }
  // Pure noise has no power law in it.
  Series noise;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ud(1.0, 100.0);
  for (int i = 0; i < 400; ++i) {
    noise.t.push_back(i * 0.01);
    noise.g.push_back(ud(rng));
  }
  try {
    fit_power_law(lambda_series(noise.t, noise.g));
    FAIL("expected DegenerateFit");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateFit);
  }
}

TEST_CASE("log-log law") {
  auto s = geometric(loglog_law, 1.0, 0.3, 1e-6, 400);
  const auto fit = fit_power_law(lambda_series(s.t, s.g));
  const double spread = relative_spread(fit.loglog_ratio);
  CHECK(spread < 0.05);

  auto clean = geometric([](double tau) { return std::pow(tau, -0.5); }, 1.0, 0.3, 1e-6, 400);
  const auto base = fit_power_law(lambda_series(clean.t, clean.g));
  CHECK(fit.rms_residual >= 10.0 * base.rms_residual);

  SUBCASE("time shift moves T_hat and leaves the ratio unchanged") {
    Series shifted = s;
    for (auto& t : shifted.t) t += 3.0;
    const auto fit2 = fit_power_law(lambda_series(shifted.t, shifted.g));
    CHECK(fit2.t_hat - 3.0 == doctest::Approx(fit.t_hat).epsilon(1e-9));
    REQUIRE(fit2.loglog_ratio.size() == fit.loglog_ratio.size());
    for (std::size_t i = 0; i < fit.loglog_ratio.size(); ++i) {
      if (std::isfinite(fit.loglog_ratio[i]))
        CHECK(fit2.loglog_ratio[i] == doctest::Approx(fit.loglog_ratio[i]).epsilon(1e-6));
    }
  }
}

TEST_CASE("relative spread") {
  CHECK(relative_spread({1.0, 1.0, 1.0}) == 0.0);
  CHECK(relative_spread({1.0, 2.0, 3.0}) == doctest::Approx(1.0));
  CHECK(relative_spread({1.0, std::nan(""), 3.0}) == doctest::Approx(1.0));
}

TEST_CASE("lower bound product") {
  auto s = power_law(0.5, 1.0, 0.5, 0.99, 400);
  auto series = lambda_series(s.t, s.g);
  const auto rep = lower_bound_check(fit_power_law(series), series);
  CHECK(rep.positive);
  CHECK(rep.inf_product == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(rep.sup_product == doctest::Approx(1.0).epsilon(1e-3));

  auto s1 = power_law(1.0, 1.0, 0.5, 0.99, 400);
  auto series1 = lambda_series(s1.t, s1.g);
  const auto rep1 = lower_bound_check(fit_power_law(series1), series1);
  CHECK(rep1.positive);
  CHECK(rep1.sup_product > 2.0 * rep1.inf_product);
}

TEST_CASE("doubling time statistics") {
  // lambda = sqrt(1 - t): crossing k at 1 - 4^{-k}, ratio 3/(4k).
  auto s = geometric([](double tau) { return 1.0 / std::sqrt(tau); }, 1.0, 1.0, 1e-8, 20000);
  const auto rows = doubling_time_stats(lambda_series(s.t, s.g));
  REQUIRE(rows.size() >= 5);
  for (const auto& r : rows) {
    CAPTURE(r.k);
    // Linear interpolation in t of log lambda, sampled at ratio 1 - 9e-4 in 1 - t.
    CHECK(r.t_k == doctest::Approx(1.0 - std::pow(4.0, -r.k)).epsilon(1e-8));
    CHECK(r.ratio == doctest::Approx(0.75 / r.k).epsilon(1e-4));
  }

  // The soliton never crosses a dyadic level.
  const auto& gs = gs1024();
  auto traj = evolve(gs.profile, PhysParams(1, 1.0, 0.0), StepControl{}, 0.5, gs);
  try {
    doubling_time_stats(lambda_series(traj, gs));
    FAIL("expected InsufficientCrossings");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InsufficientCrossings);
  }
}

TEST_CASE("profile rescaling and distance") {
  const auto& gs = gs1024();
  const auto& q = gs.profile;

  auto v = profile_rescale(q, gs);
  CHECK(profile_distance(v, gs) < 1e-8);
  CHECK(profile_distance(q, gs) < 1e-8);

  auto moved = shifted(q, 37, 0.8);
  CHECK(profile_distance(moved, gs) < 1e-8);
  CHECK(profile_distance(profile_rescale(moved, gs), gs) < 1e-8);

  // Invariance for a field that is not Q.
  auto w = sample(q.grid, [](double x, double) { return Complex(1.5 * std::exp(-0.7 * x * x), 0.4 * x * std::exp(-x * x)); });
  const double dw = profile_distance(w, gs);
  CHECK(dw > 0.1);
  CHECK(profile_distance(shifted(w, 101, -2.0), gs) == doctest::Approx(dw).epsilon(1e-10));

  // A dilated copy of Q is brought back to Q.
  auto dil = sample(q.grid, [](double x, double) {
    const double lam = 1.5;
    return std::sqrt(lam) * std::pow(3.0, 0.25) / std::sqrt(std::cosh(2.0 * lam * (x - 0.78125)));
  });
  CHECK(profile_distance(profile_rescale(dil, gs), gs) < 1e-5);

  // Too concentrated to resample.
  auto sharp = sample(q.grid, [](double x, double) { return Complex(100.0 * std::exp(-x * x), 0.0); });
  try {
    profile_rescale(sharp, gs);
    FAIL("expected InvalidArgument");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidArgument);
  }
}

TEST_CASE("exclusion experiment") {
  auto g = make_grid(1, 20.0, 512);
  auto gs = solve_ground_state(g, 1);
  StepControl c;

  SUBCASE("undamped, Weinstein regime") {
    const auto rep = exclusion_experiment(PhysParams(1, 1.0, 0.0), gs, 0.9, c, 5.0);
    CHECK(rep.passed);
    REQUIRE(rep.runs.size() == 2);
    for (const auto& r : rep.runs) {
      CHECK(r.termination == Termination::TimeReached);
      CHECK(r.lambda_decrease < 4.0);
    }
  }

  SUBCASE("damped, half the critical mass") {
    const auto rep = exclusion_experiment(PhysParams(1, 2.0, 0.01), gs, 0.5, c, 5.0);
    CHECK(rep.passed);
    CHECK(rep.mass_fraction == 0.5);
  }
}

TEST_CASE("dyadic states of a collapsing run") {
  auto g = make_grid(1, 10.0, 1024);
  auto gs = solve_ground_state(g, 1);
  ComplexField u0 = gs.profile;
  for (auto& z : u0.values) z *= std::sqrt(1.2);
  const auto run = run_with_dyadic_states(u0, PhysParams(1, 1.0, 0.01), StepControl{}, 5.0, gs);
  CHECK(run.traj.termination == Termination::BlowupResolutionLimit);
  REQUIRE(run.dyadic_k.size() >= 2);
  REQUIRE(run.dyadic_states.size() == run.dyadic_k.size());
  for (std::size_t i = 0; i < run.dyadic_k.size(); ++i) {
    CHECK(run.dyadic_k[i] == static_cast<int>(i) + 1);
    CHECK(gs.grad_norm / grad_norm(run.dyadic_states[i].field) <= std::pow(2.0, -run.dyadic_k[i]) * (1.0 + 1e-12));
    if (i > 0) CHECK(run.dyadic_states[i].t > run.dyadic_states[i - 1].t);
  }
  const auto growth = energy_growth_ratio(run.traj);
  CHECK(growth.size() == run.traj.records.size());
  CHECK(std::isfinite(growth.back()));
}
