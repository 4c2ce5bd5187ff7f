#pragma once

#include <complex>

#include <Eigen/Dense>

#include "biphoton/aperture.hpp"
#include "biphoton/correlation.hpp"
#include "biphoton/error.hpp"
#include "biphoton/grid.hpp"

namespace biphoton {

/// Two-photon wave packet F(q, q') sampled on rows x cols. Rows index the
/// first photon's wave number, columns the second's. Square amplitudes
/// (rows == cols) are symmetric under exchange.
struct BiphotonAmplitude {
    QGrid rows;
    QGrid cols;
    Eigen::MatrixXcd values;
    KernelKind regime;
    Diagnostics diagnostics;

    bool is_square() const noexcept { return rows == cols; }
};

/// F(q, q') for the given kernel. Delta uses the closed form in the sum
/// q + q', Uniform the product of single-photon transforms, Gaussian the
/// midpoint double sum over `quad`.
///
/// Throws CoverageError if `quad` does not contain the aperture support. A
/// "resolution" diagnostic is attached when the grid spacing exceeds s/32.
BiphotonAmplitude biphoton_amplitude(const ApertureSpec& ap, const CorrelationKernel& kernel, const QGrid& grid,
                                     const XGrid& quad);

/// Rectangular variant: q over `rows`, q' over `cols`.
BiphotonAmplitude biphoton_amplitude(const ApertureSpec& ap, const CorrelationKernel& kernel, const QGrid& rows,
                                     const QGrid& cols, const XGrid& quad);

/// Perfect correlation: F[A^2](q + q') / sqrt(2 pi).
std::complex<double> amplitude_delta(const ApertureSpec& ap, double q_sum) noexcept;

/// No correlation: F[A](q) F[A](q').
std::complex<double> amplitude_separable(const ApertureSpec& ap, double q, double q_prime) noexcept;

/// Cells per slit width below which a resolution diagnostic is raised.
inline constexpr double kMinCellsPerSlit = 32.0;

/// Checks coverage (throws) and resolution (appends a diagnostic).
void check_quadrature(const ApertureSpec& ap, const XGrid& quad, Diagnostics& diagnostics);

} // namespace biphoton
