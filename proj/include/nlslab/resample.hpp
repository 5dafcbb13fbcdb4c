#pragma once

#include <array>

#include "nlslab/grid.hpp"

namespace nlslab {

/// Returns w with w(x_j) = u(center + scale * x_j), evaluating the
/// trigonometric interpolant of u exactly (separable direct sums, O(N^{d+1})).
/// Points outside the box wrap periodically.
ComplexField resample(const ComplexField& u, std::array<double, 2> center, double scale);

}  // namespace nlslab
