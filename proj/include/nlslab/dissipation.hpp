#pragma once

#include <array>

#include "nlslab/grid.hpp"

namespace nlslab {

/// Every scalar functional recorded along a trajectory, computed from one
/// spectral gradient evaluation.
struct FieldFunctionals {
  double mass = 0.0;
  double grad_sq = 0.0;    ///< |grad u|^2
  double potential = 0.0;  ///< int |u|^{4/d+2}
  double energy = 0.0;
  std::array<double, 2> momentum{};
  double max_amp = 0.0;
  /// 2a int |u|^{p+2}: the mass loss rate.
  double d_mass = 0.0;
  /// K(u) = | |u|^{p/2} grad u |^2 - C_p int |u|^{4/d+2+p}, the energy
  /// dissipation functional in the form dE/dt = -a K is usually quoted.
  double k_quoted = 0.0;
  /// K_exact(u) = int |u|^p |grad u|^2 + p int |u|^{p-2} (Re conj(u) grad u)^2
  ///              - int |u|^{4/d+2+p}, for which dE/dt = -a K_exact holds.
  double k_exact = 0.0;
  /// 2a Im int conj(u) |u|^p grad u: the momentum loss rate.
  std::array<double, 2> d_mom{};
};

FieldFunctionals field_functionals(const ComplexField& u, const PhysParams& params);

struct DissipationFunctionals {
  double d_mass = 0.0;
  double k = 0.0;
  std::array<double, 2> d_mom{};
};

/// Right-hand sides of the mass, energy and momentum balance laws.
DissipationFunctionals dissipation_functionals(const ComplexField& u, const PhysParams& params);

}  // namespace nlslab
