#pragma once

#include <cmath>
#include <vector>

#include "nlslab/grid.hpp"

namespace nlslab {

// Functionals of a field. "mass" is the squared L2 norm, the integral of
// |u|^2; gradient norms are unsquared unless the name says otherwise.

/// Spectral gradient; the Nyquist mode of each derivative is zeroed.
std::vector<ComplexField> gradient(const ComplexField& u);

double mass(const ComplexField& u);

/// Integral of |grad u|^2, evaluated spectrally (consistent with gradient()).
double grad_norm_sq(const ComplexField& u);
inline double grad_norm(const ComplexField& u) { return std::sqrt(grad_norm_sq(u)); }

/// Integral of |u|^q.
double lp_norm_pow(const ComplexField& u, double q);

/// E(u) = 1/2 |grad u|^2 - s d/(4+2d) int |u|^{4/d+2}.
double energy(const ComplexField& u, const PhysParams& params);

/// Components Im int (d_j u) conj(u).
std::vector<double> momentum(const ComplexField& u);

double max_amplitude(const ComplexField& u);

/// |z|^q from rho = |z|^2, with 0^q = 0. Integer q in [-4, 32] avoids the
/// exp/log route.
inline double abs_pow_from_sq(double rho, double q) {
  if (!(rho > 0.0)) return 0.0;
  if (q == std::floor(q) && q >= -4.0 && q <= 32.0) {
    const int n = static_cast<int>(q);
    const int half = (n >= 0 ? n : -n) / 2;
    double r = 1.0;
    for (int i = 0; i < half; ++i) r *= rho;
    if (n % 2 != 0) r *= std::sqrt(rho);
    return n >= 0 ? r : 1.0 / r;
  }
  return std::exp(0.5 * q * std::log(rho));
}

}  // namespace nlslab
