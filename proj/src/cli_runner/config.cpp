#include "nlslab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>

namespace nlslab {

namespace {

const std::vector<std::string> kSubcommands = {"ground-state", "evolve", "identities", "blowup",
                                               "gn-constant",  "scatter", "sweep",     "validate-s"};

const std::map<std::string, Overrides>& presets() {
  static const std::map<std::string, Overrides> table = {
      {"soliton-check",
       {{"run.subcommand", "evolve"},
        {"physics.d", "1"},
        {"physics.p", "1"},
        {"physics.a", "0"},
        {"initial.kind", "ground_state_scaled"},
        {"time.t_end", "5"},
        {"checks.drift_tol", "1e-8"}}},
      {"supercritical",
       {{"run.subcommand", "blowup"},
        {"blowup.mode", "supercritical"},
        {"physics.d", "1"},
        {"physics.p", "1"},
        {"physics.a", "0.01"},
        {"initial.kind", "ground_state_scaled"},
        {"initial.mass_factor", "1.2"},
        {"grid.L", "10"},
        {"grid.N", "16384"},
        {"ground_state.tol", "1e-7"},
        {"time.t_end", "5"}}},
      {"thm1-part1",
       {{"run.subcommand", "evolve"},
        {"physics.d", "1"},
        {"physics.p", "5"},
        {"physics.a", "1"},
        {"initial.kind", "gaussian"},
        {"initial.mass_factor", "1.2"},
        {"time.t_end", "2"}}},
      {"thm1-part2",
       {{"run.subcommand", "evolve"},
        {"physics.d", "1"},
        {"physics.p", "1"},
        {"physics.a", "0.1"},
        {"initial.kind", "gaussian"},
        {"initial.gn_mass_fraction", "0.9"},
        {"time.t_end", "10"},
        {"checks.energy_monotone", "true"}}},
      {"thm1-part3",
       {{"run.subcommand", "blowup"},
        {"blowup.mode", "supercritical"},
        {"physics.d", "1"},
        {"physics.p", "1"},
        {"physics.a", "0.01"},
        {"initial.kind", "ground_state_scaled"},
        {"initial.mass_factor", "1.2"},
        {"grid.L", "10"},
        {"grid.N", "16384"},
        {"ground_state.tol", "1e-7"},
        {"time.t_end", "5"}}},
      {"thm1-part4",
       {{"run.subcommand", "sweep"},
        {"physics.d", "1"},
        {"grid.L", "20"},
        {"grid.N", "1024"},
        {"time.t_end", "20"},
        {"sweep.p", "1, 2"},
        {"sweep.a", "0.001, 0.01, 0.1"},
        {"sweep.mass_fraction", "0.5, 0.9"}}},
      {"thm2",
       {{"run.subcommand", "scatter"},
        {"physics.d", "1"},
        {"physics.p", "4"},
        {"physics.a", "0.5"},
        {"initial.kind", "gaussian"},
        {"initial.mass_factor", "1.2"},
        {"grid.L", "80"},
        {"grid.N", "2048"},
        {"time.cfl_nl", "0.0003"},
        {"time.dt_max", "5e-4"},
        {"time.t_end", "20"},
        {"time.snapshot_times", "5, 10, 15, 20"}}},
      {"S-validation",
       {{"run.subcommand", "validate-s"},
        {"physics.a", "0"},
        {"grid.L", "20"},
        {"grid.N", "4096"},
        {"initial.kind", "pseudo_conformal"},
        {"initial.t0", "-1"},
        {"time.dt_max", "1e-4"},
        {"time.cfl_nl", "0.001"},
        {"validate_s.t_final", "-0.25"}}},
  };
  return table;
}

struct Entry {
  std::string key;
  std::string value;
  int line = 0;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> to_double(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<long long> to_integer(const std::string& s) {
  long long v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

std::optional<bool> to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  return std::nullopt;
}

std::optional<std::vector<double>> to_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto v = to_double(trim(item));
    if (!v) return std::nullopt;
    out.push_back(*v);
  }
  return out;
}

class Builder {
public:
  Builder() { register_keys(); }

  void apply(const Entry& e) {
    const auto it = setters_.find(e.key);
    if (it == setters_.end()) {
      error(ConfigError::Kind::UnknownKey, e, "unknown key '" + e.key + "'");
      return;
    }
    it->second(e);
  }

  void validate();

  ExperimentConfig cfg;
  std::vector<ConfigError> errors;

private:
  using Setter = std::function<void(const Entry&)>;

  void error(ConfigError::Kind kind, const Entry& e, std::string message) {
    errors.push_back({kind, e.key, e.line, std::move(message)});
  }
  void domain(const std::string& key, std::string message) {
    errors.push_back({ConfigError::Kind::DomainViolation, key, line_of(key), std::move(message)});
  }
  int line_of(const std::string& key) const {
    const auto it = lines_.find(key);
    return it == lines_.end() ? 0 : it->second;
  }

  void real(const std::string& key, double& target) {
    setters_[key] = [this, &target](const Entry& e) {
      if (auto v = to_double(e.value)) {
        target = *v;
        lines_[e.key] = e.line;
      } else {
        error(ConfigError::Kind::Syntax, e, "expected a number, got '" + e.value + "'");
      }
    };
  }
  void optional_real(const std::string& key, std::optional<double>& target) {
    setters_[key] = [this, &target](const Entry& e) {
      if (auto v = to_double(e.value)) {
        target = *v;
        lines_[e.key] = e.line;
      } else {
        error(ConfigError::Kind::Syntax, e, "expected a number, got '" + e.value + "'");
      }
    };
  }
  template <typename Int>
  void integer(const std::string& key, Int& target) {
    setters_[key] = [this, &target](const Entry& e) {
      auto v = to_integer(e.value);
      if (!v) {
        // Accept integral values written as reals, e.g. "1.0"; other domain
        // checks happen in validate().
        if (auto r = to_double(e.value); r && *r == std::floor(*r) && std::abs(*r) < 9e15)
          v = static_cast<long long>(*r);
      }
      if (!v) {
        error(ConfigError::Kind::Syntax, e, "expected an integer, got '" + e.value + "'");
        return;
      }
      if constexpr (std::is_unsigned_v<Int>) {
        if (*v < 0) {
          error(ConfigError::Kind::DomainViolation, e, e.key + " must be non-negative");
          return;
        }
      }
      target = static_cast<Int>(*v);
      lines_[e.key] = e.line;
    };
  }
  void boolean(const std::string& key, bool& target) {
    setters_[key] = [this, &target](const Entry& e) {
      if (auto v = to_bool(e.value)) {
        target = *v;
        lines_[e.key] = e.line;
      } else {
        error(ConfigError::Kind::Syntax, e, "expected true/false, got '" + e.value + "'");
      }
    };
  }
  void text(const std::string& key, std::string& target) {
    setters_[key] = [this, &target](const Entry& e) {
      target = e.value;
      lines_[e.key] = e.line;
    };
  }
  void list(const std::string& key, std::vector<double>& target) {
    setters_[key] = [this, &target](const Entry& e) {
      if (auto v = to_list(e.value)) {
        target = *v;
        lines_[e.key] = e.line;
      } else {
        error(ConfigError::Kind::Syntax, e, "expected a comma-separated list of numbers");
      }
    };
  }
  void choice(const std::string& key, std::string& target, std::vector<std::string> allowed) {
    setters_[key] = [this, &target, allowed](const Entry& e) {
      if (std::find(allowed.begin(), allowed.end(), e.value) == allowed.end()) {
        std::string msg = e.key + " must be one of";
        for (const auto& a : allowed) msg += " " + a;
        error(ConfigError::Kind::DomainViolation, e, msg);
        return;
      }
      target = e.value;
      lines_[e.key] = e.line;
    };
  }

  void register_keys();

  std::map<std::string, Setter> setters_;
  std::map<std::string, int> lines_;
  std::string initial_kind_ = "ground_state_scaled";
};

void Builder::register_keys() {
  choice("run.subcommand", cfg.subcommand, kSubcommands);
  // The preset itself is resolved before the entries are applied.
  setters_["run.preset"] = [](const Entry&) {};
  integer("run.seed", cfg.seed);
  integer("physics.d", cfg.d);
  real("physics.p", cfg.p);
  real("physics.a", cfg.a);
  boolean("physics.focusing", cfg.focusing);
  real("grid.L", cfg.L);
  integer("grid.N", cfg.N);
  choice("initial.kind", initial_kind_, {"ground_state_scaled", "gaussian", "pseudo_conformal", "snapshot"});
  optional_real("initial.mass_factor", cfg.initial.mass_factor);
  optional_real("initial.gn_mass_fraction", cfg.initial.gn_mass_fraction);
  real("initial.amp", cfg.initial.amp);
  real("initial.width", cfg.initial.width);
  real("initial.wavenumber", cfg.initial.wavenumber);
  real("initial.t0", cfg.initial.t0);
  text("initial.path", cfg.initial.path);
  real("time.t_end", cfg.t_end);
  optional_real("time.dt", cfg.fixed_dt);
  real("time.dt_max", cfg.step.dt_max);
  real("time.dt_min", cfg.step.dt_min);
  real("time.cfl_nl", cfg.step.cfl_nl);
  real("time.amp_cap", cfg.step.amp_cap);
  real("time.lambda_floor", cfg.step.lambda_floor);
  list("time.snapshot_times", cfg.snapshot_times);
  text("output.dir", cfg.out_dir);
  text("output.csv", cfg.csv_name);
  text("output.json", cfg.json_name);
  boolean("output.snapshots", cfg.write_snapshots);
  real("ground_state.tol", cfg.gs_tol);
  integer("ground_state.max_iter", cfg.gs_max_iter);
  choice("blowup.mode", cfg.blowup_mode, {"supercritical", "exclusion", "pseudoconformal"});
  real("blowup.window_fraction", cfg.window_fraction);
  integer("gn.random_fields", cfg.gn_random_fields);
  real("exclusion.mass_fraction", cfg.mass_fraction);
  list("sweep.p", cfg.sweep_p);
  list("sweep.a", cfg.sweep_a);
  list("sweep.mass_fraction", cfg.sweep_mass_fraction);
  real("checks.identity_tol", cfg.identity_tol);
  boolean("checks.dt_halving", cfg.dt_halving);
  real("checks.drift_tol", cfg.drift_tol);
  boolean("checks.energy_monotone", cfg.energy_monotone);
  real("validate_s.t_final", cfg.s_t_final);
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void Builder::validate() {
  if (initial_kind_ == "gaussian") cfg.initial.kind = InitialKind::Gaussian;
  else if (initial_kind_ == "pseudo_conformal") cfg.initial.kind = InitialKind::PseudoConformal;
  else if (initial_kind_ == "snapshot") cfg.initial.kind = InitialKind::Snapshot;
  else cfg.initial.kind = InitialKind::GroundStateScaled;

  if (cfg.d != 1 && cfg.d != 2) domain("physics.d", "d must be 1 or 2");
  if (!(cfg.p >= 1.0)) domain("physics.p", "p must satisfy p >= 1");
  if (!(cfg.a >= 0.0)) domain("physics.a", "a must satisfy a >= 0");
  if (!(cfg.L > 0.0)) domain("grid.L", "L must be positive");
  if (!is_power_of_two(cfg.N) || cfg.N < 16) domain("grid.N", "N must be a power of two >= 16");
  if (!(cfg.t_end > 0.0)) domain("time.t_end", "t_end must be positive");
  if (!(cfg.step.dt_min > 0.0) || !(cfg.step.dt_min < cfg.step.dt_max))
    domain("time.dt_min", "step control requires 0 < dt_min < dt_max");
  if (cfg.fixed_dt && !(*cfg.fixed_dt > cfg.step.dt_min))
    domain("time.dt", "fixed dt must exceed dt_min");
  if (!(cfg.step.cfl_nl > 0.0)) domain("time.cfl_nl", "cfl_nl must be positive");
  if (!(cfg.step.amp_cap > 0.0)) domain("time.amp_cap", "amp_cap must be positive");
  if (!(cfg.step.lambda_floor >= 2.0)) domain("time.lambda_floor", "lambda_floor must be >= 2");
  for (double t : cfg.snapshot_times)
    if (!(t >= 0.0 && t <= cfg.t_end)) {
      domain("time.snapshot_times", "snapshot times must lie in [0, t_end]");
      break;
    }
  if (cfg.initial.mass_factor && !(*cfg.initial.mass_factor > 0.0))
    domain("initial.mass_factor", "mass_factor must be positive");
  if (cfg.initial.gn_mass_fraction && !(*cfg.initial.gn_mass_fraction > 0.0 && *cfg.initial.gn_mass_fraction <= 1.0))
    domain("initial.gn_mass_fraction", "gn_mass_fraction must lie in (0, 1]");
  if (cfg.initial.gn_mass_fraction && !(cfg.p >= 1.0 && cfg.p <= 2.0))
    domain("initial.gn_mass_fraction", "the GN threshold is defined for 1 <= p <= 2");
  if (!(cfg.initial.width > 0.0)) domain("initial.width", "width must be positive");
  if (!(cfg.initial.amp > 0.0)) domain("initial.amp", "amp must be positive");
  if (!(cfg.initial.t0 < 0.0)) domain("initial.t0", "t0 must be negative");
  if (cfg.initial.kind == InitialKind::Snapshot) {
    if (cfg.initial.path.empty()) {
      errors.push_back({ConfigError::Kind::MissingFile, "initial.path", line_of("initial.kind"),
                        "snapshot initial data needs initial.path"});
    } else if (!std::filesystem::is_regular_file(cfg.initial.path)) {
      errors.push_back({ConfigError::Kind::MissingFile, "initial.path", line_of("initial.path"),
                        "no such file: " + cfg.initial.path});
    }
  }
  if (!(cfg.gs_tol > 0.0 && cfg.gs_tol <= 1e-6)) domain("ground_state.tol", "tol must lie in (0, 1e-6]");
  if (cfg.gs_max_iter < 1) domain("ground_state.max_iter", "max_iter must be positive");
  if (!(cfg.window_fraction > 0.0 && cfg.window_fraction <= 1.0))
    domain("blowup.window_fraction", "window_fraction must lie in (0, 1]");
  if (cfg.gn_random_fields > 100000) domain("gn.random_fields", "at most 100000 random fields");
  if (!(cfg.mass_fraction > 0.0 && cfg.mass_fraction < 1.0))
    domain("exclusion.mass_fraction", "mass_fraction must lie in (0, 1)");
  if (!(cfg.identity_tol > 0.0)) domain("checks.identity_tol", "tolerance must be positive");
  if (!(cfg.drift_tol > 0.0)) domain("checks.drift_tol", "tolerance must be positive");
  if (cfg.out_dir.empty()) domain("output.dir", "output directory must not be empty");

  if (cfg.subcommand == "gn-constant" && !(cfg.p >= 1.0 && cfg.p <= 2.0))
    domain("physics.p", "gn-constant needs 1 <= p <= 2");
  if (cfg.subcommand == "scatter" && cfg.p * cfg.d != 4.0) domain("physics.p", "scatter needs p = 4/d");
  if (cfg.subcommand == "blowup" && cfg.blowup_mode == "exclusion" && !(cfg.p * cfg.d < 4.0))
    domain("physics.p", "the exclusion experiment needs p < 4/d");
  if (cfg.subcommand == "validate-s" || (cfg.subcommand == "blowup" && cfg.blowup_mode == "pseudoconformal")) {
    if (cfg.a != 0.0) domain("physics.a", "S(t) solves the undamped equation; a must be 0");
    if (cfg.initial.kind != InitialKind::PseudoConformal)
      domain("initial.kind", "this run starts from pseudo_conformal data");
  }
  if (cfg.subcommand == "validate-s" && !(cfg.s_t_final > cfg.initial.t0 && cfg.s_t_final < 0.0))
    domain("validate_s.t_final", "t_final must lie in (t0, 0)");
  if (cfg.subcommand == "sweep") {
    const auto bad_list = [&](const std::string& key, const std::vector<double>& v, auto ok) {
      if (v.empty() || !std::all_of(v.begin(), v.end(), ok)) domain(key, key + " has an empty list or a value out of range");
    };
    bad_list("sweep.p", cfg.sweep_p, [&](double p) { return p >= 1.0 && p * cfg.d < 4.0; });
    bad_list("sweep.a", cfg.sweep_a, [](double a) { return a >= 0.0; });
    bad_list("sweep.mass_fraction", cfg.sweep_mass_fraction, [](double f) { return f > 0.0 && f < 1.0; });
  }
}

}  // namespace

StepControl ExperimentConfig::step_control() const {
  StepControl s = step;
  if (fixed_dt) {
    s.dt_max = *fixed_dt;
    s.cfl_nl = 1e300;  // clamp always selects dt_max
  }
  return s;
}

std::string_view to_string(ConfigError::Kind kind) {
  switch (kind) {
    case ConfigError::Kind::Syntax: return "Syntax";
    case ConfigError::Kind::UnknownKey: return "UnknownKey";
    case ConfigError::Kind::DomainViolation: return "DomainViolation";
    case ConfigError::Kind::MissingFile: return "MissingFile";
  }
  return "Unknown";
}

std::string format(const ConfigError& e) {
  std::string s(to_string(e.kind));
  if (e.line > 0) s += " (line " + std::to_string(e.line) + ")";
  if (!e.key.empty()) s += " [" + e.key + "]";
  return s + ": " + e.message;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, entries] : presets()) names.push_back(name);
  return names;
}

ParseResult parse_config(std::string_view text, const Overrides& overrides) {
  Builder b;
  std::vector<Entry> entries;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        b.errors.push_back({ConfigError::Kind::Syntax, "", line_no, "malformed section header '" + line + "'"});
        continue;
      }
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      b.errors.push_back({ConfigError::Kind::Syntax, "", line_no, "expected key = value, got '" + line + "'"});
      continue;
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) {
      b.errors.push_back({ConfigError::Kind::Syntax, "", line_no, "empty key"});
      continue;
    }
    entries.push_back({section.empty() ? key : section + "." + key, value, line_no});
  }
  std::vector<Entry> extra;
  for (const auto& [k, v] : overrides) extra.push_back({k, v, 0});

  std::string preset;
  for (const auto* list : {&entries, &extra})
    for (const auto& e : *list)
      if (e.key == "run.preset") preset = e.value;
  if (!preset.empty()) {
    const auto it = presets().find(preset);
    if (it == presets().end()) {
      std::string msg = "unknown preset '" + preset + "'; known:";
      for (const auto& n : preset_names()) msg += " " + n;
      b.errors.push_back({ConfigError::Kind::DomainViolation, "run.preset", 0, msg});
    } else {
      for (const auto& [k, v] : it->second) b.apply({k, v, 0});
      b.cfg.preset = preset;
    }
  }
  for (const auto& e : entries) b.apply(e);
  for (const auto& e : extra) b.apply(e);
  b.validate();

  ParseResult r;
  r.errors = std::move(b.errors);
  if (r.errors.empty()) r.config = std::move(b.cfg);
  return r;
}

}  // namespace nlslab
