#pragma once

#include <complex>

#include "biphoton/aperture.hpp"
#include "biphoton/correlation.hpp"
#include "biphoton/grid.hpp"

// Brute-force reference evaluators. Scalar loops straight from the defining
// integrals; they share nothing with the fast paths beyond ApertureSpec,
// transmittance() and CorrelationKernel::evaluate().
namespace biphoton::oracle {

/// Coarsest x spacing the oracles accept, in slit widths.
inline constexpr double kOracleCellsPerSlit = 64.0;

/// (1/sqrt(2 pi)) dx sum_m A(x_m) exp(i q x_m) over the cell midpoints.
/// Throws CoverageError, or ValidationError("x_points") when dx > s/64.
std::complex<double> riemann_ft(const ApertureSpec& ap, double q, const XGrid& quad);

/// (1/2pi) dx^2 sum_mn A(x_m) A(x_n) G(x_m - x_n) exp(i(q x_m + q' x_n)),
/// accumulated with compensated summation. Throws UnsupportedEvaluation for
/// the delta kernel.
std::complex<double> riemann_amplitude(const ApertureSpec& ap, const CorrelationKernel& kernel, double q,
                                       double q_prime, const XGrid& quad);

/// Richardson extrapolation of a step-h and a step-h/2 estimate whose
/// leading error term is O(h^order).
template <typename T>
T richardson(const T& coarse, const T& fine, int order) {
    const double factor = static_cast<double>(1 << order);
    return (factor * fine - coarse) / (factor - 1.0);
}

} // namespace biphoton::oracle
