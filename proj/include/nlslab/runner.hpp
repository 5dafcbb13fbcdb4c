#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nlslab/config.hpp"
#include "nlslab/diagnostics.hpp"
#include "nlslab/evolver.hpp"
#include "nlslab/ground_state.hpp"

namespace nlslab {

enum ExitCode : int {
  kExitPass = 0,
  kExitInvalidConfig = 1,
  kExitAssertion = 2,
  kExitNumerical = 3,
  kExitIo = 4,
};

struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;
  std::string detail;
};

struct RunOutcome {
  int exit_code = kExitPass;
  std::vector<Check> checks;
  std::string summary_json;
  std::vector<std::filesystem::path> artifacts;
  std::string error;  ///< set when the run aborted with an exception
};

/// Solves for Q on the configured grid.
GroundState ground_state_for(const ExperimentConfig& cfg);

/// Initial data described by cfg.initial on the grid of gs.
ComplexField make_initial_data(const ExperimentConfig& cfg, const GroundState& gs);

/// Trajectory table: t, dt, mass, energy, px[, py], grad_norm, max_amp,
/// lambda, D_mass, K, r_mass, r_energy, r_mom, then K_exact and
/// r_energy_exact. Residual columns of row n describe the interval ending
/// there (nan on the first row).
std::string trajectory_csv(const Trajectory& traj);

/// Runs one experiment, writes its artifacts under cfg.out_dir and returns
/// the exit status (0 pass, 2 failed check, 3 numerical failure, 4 I/O).
RunOutcome run_experiment(const ExperimentConfig& cfg);

/// Worker cap for sweeps: NLSLAB_THREADS if set and positive, otherwise the
/// hardware concurrency.
unsigned worker_threads();

}  // namespace nlslab
