// Command-line front end: nlslab <subcommand> [--config FILE] [options].

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nlslab/config.hpp"
#include "nlslab/runner.hpp"

namespace {

struct Options {
  std::string config_path;
  std::string preset;
  std::string out_dir;
  std::vector<std::string> sets;
  std::optional<double> p, a, mass_factor, L, t_end, dt;
  std::optional<int> d;
  std::optional<std::size_t> n;
  std::optional<std::uint64_t> seed;
  std::string snapshot_at;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config,-c", o.config_path, "experiment config file ([section] key = value)");
  cmd->add_option("--preset", o.preset, "named preset supplying defaults");
  cmd->add_option("--out,-o", o.out_dir, "output directory");
  cmd->add_option("--set", o.sets, "override, e.g. --set physics.a=0.05");
  cmd->add_option("--d", o.d, "spatial dimension");
  cmd->add_option("--p", o.p, "damping power p");
  cmd->add_option("--a", o.a, "damping coefficient a");
  cmd->add_option("--mass-factor", o.mass_factor, "data mass in units of M(Q)");
  cmd->add_option("--N", o.n, "points per axis");
  cmd->add_option("--L", o.L, "box half-width");
  cmd->add_option("--t-end", o.t_end, "final time");
  cmd->add_option("--dt", o.dt, "fixed time step");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--snapshot-at", o.snapshot_at, "comma-separated snapshot times");
  cmd->add_flag("--quiet,-q", o.quiet, "print only errors");
}

template <typename T>
std::string str(const T& v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Damped L2-critical NLS laboratory"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");
  bool list_presets = false;
  app.add_flag("--list-presets", list_presets, "print preset names and exit");
  Options o;
  std::string blowup_mode;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"ground-state", "solve for Q and write it with a JSON report"},
      {"evolve", "integrate one trajectory"},
      {"identities", "integrate and check the balance laws"},
      {"blowup", "blow-up detection, rate fit and exclusion runs"},
      {"gn-constant", "estimate the generalized GN constant and alpha"},
      {"scatter", "mass budget and scattering monitor for p = 4/d"},
      {"sweep", "exclusion lattice across worker threads"},
      {"validate-s", "compare an evolution with the explicit S(t)"},
      {"run", "run the subcommand named in the config"}};
  for (const auto& [name, help] : commands) {
    auto* cmd = app.add_subcommand(name, help);
    add_common(cmd, o);
    if (name == "blowup")
      cmd->add_option("--mode", blowup_mode, "supercritical | exclusion | pseudoconformal");
  }
  app.require_subcommand(0, 1);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : nlslab::kExitInvalidConfig;
  }
  if (list_presets) {
    for (const auto& n : nlslab::preset_names()) std::cout << n << "\n";
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return nlslab::kExitInvalidConfig;
  }
  const std::string sub = app.get_subcommands().front()->get_name();

  std::string text;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) {
      std::cerr << "MissingFile: cannot read config " << o.config_path << "\n";
      return nlslab::kExitInvalidConfig;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  nlslab::Overrides ov;
  if (!o.preset.empty()) ov.emplace_back("run.preset", o.preset);
  if (sub != "run") ov.emplace_back("run.subcommand", sub);
  if (!blowup_mode.empty()) ov.emplace_back("blowup.mode", blowup_mode);
  if (o.d) ov.emplace_back("physics.d", str(*o.d));
  if (o.p) ov.emplace_back("physics.p", str(*o.p));
  if (o.a) ov.emplace_back("physics.a", str(*o.a));
  if (o.mass_factor) ov.emplace_back("initial.mass_factor", str(*o.mass_factor));
  if (o.n) ov.emplace_back("grid.N", str(*o.n));
  if (o.L) ov.emplace_back("grid.L", str(*o.L));
  if (o.t_end) ov.emplace_back("time.t_end", str(*o.t_end));
  if (o.dt) ov.emplace_back("time.dt", str(*o.dt));
  if (o.seed) ov.emplace_back("run.seed", str(*o.seed));
  if (!o.snapshot_at.empty()) ov.emplace_back("time.snapshot_times", o.snapshot_at);
  if (!o.out_dir.empty()) ov.emplace_back("output.dir", o.out_dir);
  for (const auto& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      std::cerr << "Syntax: --set expects section.key=value, got '" << s << "'\n";
      return nlslab::kExitInvalidConfig;
    }
    ov.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }

  const auto parsed = nlslab::parse_config(text, ov);
  if (!parsed.ok()) {
    for (const auto& e : parsed.errors) std::cerr << nlslab::format(e) << "\n";
    return nlslab::kExitInvalidConfig;
  }
  const auto outcome = nlslab::run_experiment(*parsed.config);
  if (!outcome.error.empty()) {
    std::cerr << outcome.error << "\n";
    return outcome.exit_code;
  }
  if (!o.quiet) {
    for (const auto& c : outcome.checks)
      std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " = " << c.value
                << (c.detail.empty() ? "" : "  (" + c.detail + ")") << "\n";
    for (const auto& a : outcome.artifacts) std::cout << "wrote " << a.string() << "\n";
  }
  return outcome.exit_code;
}
