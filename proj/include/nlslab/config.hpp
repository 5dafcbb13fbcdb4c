#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nlslab/evolver.hpp"
#include "nlslab/ground_state.hpp"

namespace nlslab {

enum class InitialKind { GroundStateScaled, Gaussian, PseudoConformal, Snapshot };

struct InitialSpec {
  InitialKind kind = InitialKind::GroundStateScaled;
  /// Rescales the data to mass_factor * M(Q) when set (default 1 for Q).
  std::optional<double> mass_factor;
  /// Rescales the data to gn_mass_fraction * min(alpha, alpha^2) from the
  /// generalized GN estimate; takes precedence over mass_factor.
  std::optional<double> gn_mass_fraction;
  double amp = 1.0;
  double width = 1.0;
  double wavenumber = 0.0;
  double t0 = -1.0;  ///< start time of the S(t) data
  std::string path;
};

struct ExperimentConfig {
  std::string subcommand = "evolve";
  std::string preset;
  std::string blowup_mode = "supercritical";

  int d = 1;
  double p = 1.0;
  double a = 0.0;
  bool focusing = true;

  double L = 20.0;
  std::size_t N = 2048;

  InitialSpec initial;

  double t_end = 1.0;
  StepControl step;
  /// Forces a constant step (except when landing on snapshot times).
  std::optional<double> fixed_dt;
  std::vector<double> snapshot_times;

  std::string out_dir = "nlslab_out";
  std::string csv_name = "trajectory.csv";
  std::string json_name = "summary.json";
  bool write_snapshots = true;

  std::uint64_t seed = 1;
  double gs_tol = 1e-10;
  int gs_max_iter = 500;

  double window_fraction = 0.3;
  std::size_t gn_random_fields = 100;
  double mass_fraction = 0.9;
  std::vector<double> sweep_p{1.0, 2.0};
  std::vector<double> sweep_a{0.001, 0.01, 0.1};
  std::vector<double> sweep_mass_fraction{0.5, 0.9};

  double identity_tol = 1e-6;
  bool dt_halving = false;
  double drift_tol = 1e-8;
  bool energy_monotone = false;
  double s_t_final = -0.25;

  PhysParams params() const { return PhysParams(d, p, a, focusing); }
  StepControl step_control() const;
};

struct ConfigError {
  enum class Kind { Syntax, UnknownKey, DomainViolation, MissingFile };
  Kind kind = Kind::Syntax;
  std::string key;
  int line = 0;  ///< 0 for overrides and preset entries
  std::string message;
};

std::string_view to_string(ConfigError::Kind kind);
std::string format(const ConfigError& e);

struct ParseResult {
  std::optional<ExperimentConfig> config;
  std::vector<ConfigError> errors;
  bool ok() const { return config.has_value(); }
};

using Overrides = std::vector<std::pair<std::string, std::string>>;

/// Parses "[section]" headers and "key = value" lines ('#' starts a
/// comment). Keys are addressed as section.key. A preset named by run.preset
/// (or an override of it) supplies defaults that the file and the overrides
/// then replace. Every problem is reported, not only the first.
ParseResult parse_config(std::string_view text, const Overrides& overrides = {});

/// Names accepted by run.preset.
std::vector<std::string> preset_names();

}  // namespace nlslab
