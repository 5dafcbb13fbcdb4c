#pragma once

#include <optional>
#include <vector>

#include "nlslab/grid.hpp"

namespace nlslab {

/// Positive solution Q of Delta Q - Q + Q^{1+4/d} = 0 on a grid, with the
/// scalars downstream code divides by.
struct GroundState {
  ComplexField profile;
  int dim = 1;
  double mass = 0.0;       ///< int Q^2
  double grad_norm = 0.0;  ///< |grad Q|_{L2}, unsquared
  double residual = 0.0;   ///< sup |Delta Q - Q + Q^{1+4/d}|
  int iterations = 0;
  std::vector<double> residual_history;
};

/// Closed-form 1-D profile 3^{1/4} sech^{1/2}(2x).
ComplexField analytic_q_1d(const GridPtr& grid);

/// Sup-norm defect of the ground-state equation.
double ground_state_residual(const ComplexField& q, int d);

/// Wraps an already computed profile, filling the cached scalars.
GroundState ground_state_from_profile(ComplexField q, int d);

struct PetviashviliOptions {
  double tol = 1e-10;
  int max_iter = 500;
  double seed_amplitude = 1.5;
  double seed_width = 1.0;
  /// Overrides the Gaussian seed when set.
  std::optional<ComplexField> seed;
};

/// Petviashvili iteration Q <- M^gamma (1 - Delta)^{-1} Q^q with q = 1 + 4/d,
/// gamma = q / (q - 1) and M = <(1 - Delta)Q, Q> / <Q^q, Q>.
///
/// Throws NonConvergence when the residual is still above tol after
/// max_iter iterations, and NegativePhase when an iterate loses positivity
/// (retry with a wider seed).
GroundState solve_ground_state(const GridPtr& grid, int d, const PetviashviliOptions& options = {});

/// G(u) = E(u) - 1/2 |grad u|^2 (1 - (M(u)/M(Q))^{2/d}); non-negative by the
/// sharp Gagliardo-Nirenberg inequality.
double sharp_gn_gap(const ComplexField& u, const GroundState& gs, const PhysParams& params);

struct PohozaevReport {
  double grad_sq = 0.0;        ///< |grad Q|^2
  double potential = 0.0;      ///< int Q^{4/d+2}
  double energy = 0.0;         ///< E(Q), zero for the ground state
  double pohozaev_residual = 0.0;  ///< |grad Q|^2 - d/(d+2) int Q^{4/d+2}
  double multiplier_residual = 0.0;  ///< |grad Q|^2 + int Q^2 - int Q^{4/d+2}
};

PohozaevReport pohozaev_report(const GroundState& gs, const PhysParams& params);

}  // namespace nlslab
