#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "nlslab/config.hpp"
#include "nlslab/error.hpp"
#include "nlslab/runner.hpp"
#include "nlslab/snapshot_io.hpp"

using namespace nlslab;
namespace fs = std::filesystem;

namespace {

// Per-process scratch area, removed when the test binary exits.
struct Scratch {
  fs::path root = fs::temp_directory_path() / ("nlslab_test_" + std::to_string(::getpid()));
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(root, ec);
  }
} scratch;

fs::path scratch_dir(const std::string& name) {
  const fs::path p = scratch.root / name;
  fs::remove_all(p);
  fs::create_directories(p.parent_path());
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spit(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(NLSLAB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

bool has_error(const ParseResult& r, ConfigError::Kind kind, const std::string& key) {
  for (const auto& e : r.errors)
    if (e.kind == kind && e.key == key) return true;
  return false;
}

}  // namespace

TEST_CASE("config defaults") {
  const auto r = parse_config("[run]\nsubcommand = evolve\n[physics]\nd = 1\n");
  REQUIRE(r.ok());
  const auto& c = *r.config;
  CHECK(c.L == 20.0);
  CHECK(c.N == 2048);
  CHECK(c.step_control().dt_max == 1e-3);
  CHECK(c.d == 1);
  CHECK(c.subcommand == "evolve");
  CHECK(r.errors.empty());
}

TEST_CASE("config values, comments and overrides") {
  const std::string text =
      "# comment\n"
      "[physics]\n"
      "p = 2   # inline\n"
      "a = 0.05\n"
      "[grid]\n"
      "N = 512\n"
      "[initial]\n"
      "kind = gaussian\n"
      "amp = 1.5\n"
      "[time]\n"
      "snapshot_times = 0.5, 1.0\n";
  const auto r = parse_config(text, {{"physics.a", "0.2"}});
  REQUIRE(r.ok());
  CHECK(r.config->p == 2.0);
  CHECK(r.config->a == 0.2);
  CHECK(r.config->N == 512);
  CHECK(r.config->initial.kind == InitialKind::Gaussian);
  CHECK(r.config->initial.amp == 1.5);
  CHECK(r.config->snapshot_times == std::vector<double>{0.5, 1.0});
}

TEST_CASE("presets") {
  const auto names = preset_names();
  for (const char* n : {"soliton-check", "supercritical", "thm1-part1", "thm1-part2", "thm1-part3", "thm1-part4", "thm2",
                        "S-validation"}) {
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
    const auto r = parse_config(std::string("[run]\npreset = ") + n + "\n");
    CHECK(r.ok());
  }
  // File entries override preset defaults.
  const auto r = parse_config("[run]\npreset = thm2\n[physics]\na = 0.25\n");
  REQUIRE(r.ok());
  CHECK(r.config->a == 0.25);
  CHECK(r.config->p == 4.0);
  CHECK(r.config->subcommand == "scatter");
}

TEST_CASE("config errors") {
  SUBCASE("p below one") {
    const auto r = parse_config("[physics]\np = 0.5\n");
    CHECK_FALSE(r.ok());
    REQUIRE(r.errors.size() == 1);
    CHECK(r.errors[0].kind == ConfigError::Kind::DomainViolation);
    CHECK(r.errors[0].key == "physics.p");
    CHECK(r.errors[0].message.find("p >= 1") != std::string::npos);
    CHECK(format(r.errors[0]).find("DomainViolation") != std::string::npos);
  }

  SUBCASE("every error is reported") {
    const auto r = parse_config("[physics]\np = 0.5\n[grid]\nN = 1000\nbogus = 3\n");
    CHECK_FALSE(r.ok());
    CHECK(r.errors.size() == 3);
    CHECK(has_error(r, ConfigError::Kind::DomainViolation, "physics.p"));
    CHECK(has_error(r, ConfigError::Kind::DomainViolation, "grid.N"));
    CHECK(has_error(r, ConfigError::Kind::UnknownKey, "grid.bogus"));
  }

  SUBCASE("syntax and missing file") {
    const auto r = parse_config("[physics\nd 1\n[initial]\nkind = snapshot\npath = /nonexistent/field.nlsf\n");
    CHECK_FALSE(r.ok());
    int syntax = 0;
    for (const auto& e : r.errors) syntax += e.kind == ConfigError::Kind::Syntax;
    CHECK(syntax == 2);
    CHECK(has_error(r, ConfigError::Kind::MissingFile, "initial.path"));
  }

  SUBCASE("line numbers") {
    const auto r = parse_config("[physics]\nd = 1\np = abc\n");
    REQUIRE(r.errors.size() == 1);
    CHECK(r.errors[0].line == 3);
  }
}

TEST_CASE("snapshot round trip") {
  const auto dir = scratch_dir("snap");
  fs::create_directories(dir);
  std::mt19937_64 rng(42);
  std::normal_distribution<double> nd;
  for (int d : {1, 2}) {
    auto g = make_grid(d, 7.5, 32);
    ComplexField u(g);
    for (auto& z : u.values) z = Complex(nd(rng), nd(rng));
    const auto path = dir / ("u" + std::to_string(d) + ".nlsf");
    write_snapshot(u, path);
    CHECK(fs::file_size(path) == 4 + 4 + 1 + 8 + 8 + 16 * g->size());
    const auto v = read_snapshot(path);
    CHECK(*v.grid == *g);
    CHECK(std::memcmp(v.values.data(), u.values.data(), 16 * g->size()) == 0);
    CHECK_NOTHROW(read_snapshot(path, d));
  }

  const auto path = dir / "u1.nlsf";
  const std::string good = slurp(path);
  auto expect_kind = [&](const std::string& bytes, ErrorKind kind, int dim = 0) {
    const auto bad = dir / "bad.nlsf";
    spit(bad, bytes);
    try {
      if (dim) read_snapshot(bad, dim);
      else read_snapshot(bad);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == kind);
      CHECK(std::string(e.what()).find("bad.nlsf") != std::string::npos);
    }
  };
  std::string magic = good;
  magic[0] = 'X';
  expect_kind(magic, ErrorKind::BadMagic);
  std::string version = good;
  version[4] = 2;
  expect_kind(version, ErrorKind::VersionMismatch);
  expect_kind(good.substr(0, good.size() - 5), ErrorKind::TruncatedFile);
  expect_kind(good.substr(0, 10), ErrorKind::TruncatedFile);
  expect_kind(good, ErrorKind::DimensionMismatch, 2);

  try {
    read_snapshot(dir / "missing.nlsf");
    FAIL("expected Io");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
}

TEST_CASE("snapshot as initial data") {
  const auto dir = scratch_dir("snapinit");
  fs::create_directories(dir);
  auto g = make_grid(1, 20.0, 256);
  auto u = sample(g, [](double x, double) { return Complex(std::exp(-x * x), 0.0); });
  write_snapshot(u, dir / "u0.nlsf");
  const auto r = parse_config("[grid]\nN = 256\n[initial]\nkind = snapshot\npath = " + (dir / "u0.nlsf").string() + "\n");
  REQUIRE(r.ok());
  const auto gs = ground_state_for(*r.config);
  const auto v = make_initial_data(*r.config, gs);
  CHECK(v.values == u.values);
}

TEST_CASE("trajectory CSV is deterministic") {
  const auto dir = scratch_dir("det");
  auto r = parse_config("[run]\nsubcommand = identities\n[physics]\na = 0.1\n[grid]\nN = 256\n"
                        "[initial]\nkind = gaussian\nwavenumber = 1\n[time]\nt_end = 0.05\n");
  REQUIRE(r.ok());
  auto cfg = *r.config;
  cfg.out_dir = (dir / "a").string();
  const auto o1 = run_experiment(cfg);
  cfg.out_dir = (dir / "b").string();
  const auto o2 = run_experiment(cfg);
  CHECK(o1.exit_code == o2.exit_code);
  const auto c1 = slurp(dir / "a" / "trajectory.csv");
  CHECK(c1.size() > 100);
  CHECK(c1 == slurp(dir / "b" / "trajectory.csv"));
  CHECK(c1.rfind("t,dt,mass,energy,px,grad_norm,max_amp,lambda,D_mass,K,r_mass,r_energy,r_mom", 0) == 0);
}

TEST_CASE("soliton-check preset") {
  const auto dir = scratch_dir("soliton");
  auto r = parse_config("[run]\npreset = soliton-check\n[grid]\nN = 1024\n");
  REQUIRE(r.ok());
  auto cfg = *r.config;
  cfg.out_dir = dir.string();
  const auto out = run_experiment(cfg);
  CHECK(out.exit_code == kExitPass);
  const auto j = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(j["passed"].get<bool>());
  CHECK(j["trajectory"]["energy_drift"].get<double>() < 1e-8);
  CHECK(j["trajectory"]["termination"] == "TimeReached");
}

TEST_CASE("supercritical preset reports the resolution limit") {
  // A coarser grid than the preset keeps this quick; only the termination
  // reason is checked here.
  const auto dir = scratch_dir("super");
  auto r = parse_config("[run]\npreset = supercritical\n[grid]\nN = 2048\n");
  REQUIRE(r.ok());
  auto cfg = *r.config;
  cfg.out_dir = dir.string();
  const auto out = run_experiment(cfg);
  const auto j = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(j["trajectory"]["termination"] == "BlowupResolutionLimit");
  CHECK(out.exit_code != kExitInvalidConfig);
}

TEST_CASE("command line") {
  const auto dir = scratch_dir("cli");
  fs::create_directories(dir);
  const auto bad = dir / "bad.ini";
  spit(bad, "[physics]\np = 0.5\n[grid]\nN = 1000\n");
  const auto out = dir / "out_bad";
  CHECK(run_cli("evolve --config " + bad.string() + " --out " + out.string()) == 1);
  CHECK_FALSE(fs::exists(out));

  CHECK(run_cli("evolve --set physics.p=0.5 --out " + out.string()) == 1);
  CHECK_FALSE(fs::exists(out));

  const auto good = dir / "out_good";
  CHECK(run_cli("ground-state --N 512 --out " + good.string()) == 0);
  CHECK(fs::exists(good / "summary.json"));
  CHECK(fs::exists(good / "Q.nlsf"));
  const auto q = read_snapshot(good / "Q.nlsf", 1);
  CHECK(q.grid->points_per_axis() == 512);

  CHECK(run_cli("--list-presets") == 0);
}
