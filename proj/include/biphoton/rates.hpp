#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "biphoton/aperture.hpp"
#include "biphoton/correlation.hpp"
#include "biphoton/error.hpp"
#include "biphoton/grid.hpp"
#include "biphoton/wavepacket.hpp"

namespace biphoton {

enum class Detection { OnePhoton, TwoPhotonDiagonal };

std::string_view to_string(Detection detection) noexcept;
/// Accepts "one-photon" and "two-photon-diagonal" (also "one", "diagonal").
Detection parse_detection(std::string_view text);

enum class Normalization { Raw, PeakNormalized };

std::string_view to_string(Normalization normalization) noexcept;
Normalization parse_normalization(std::string_view text);

/// Where a pattern came from. Rates carry arbitrary units.
struct Provenance {
    std::string kernel;
    std::string detection;
    std::string aperture;
    /// max |R1 - R1(doubled q' range)| / max R1(doubled), when measured.
    std::optional<double> truncation_residual;
    Diagnostics diagnostics;
};

/// Sampled 1D rate curve. `q` is in units of 2 pi / reference period.
struct DiffractionPattern {
    std::vector<double> q;
    std::vector<double> intensity;
    Normalization normalization = Normalization::Raw;
    Provenance provenance;

    std::size_t size() const noexcept { return q.size(); }
};

/// Checks equal lengths >= 2, non-negative finite intensities and unit peak
/// when peak-normalized. Throws ValidationError.
void validate(const DiffractionPattern& pattern);

/// Copy scaled so the maximum is 1.
DiffractionPattern peak_normalized(DiffractionPattern pattern);

/// R2(q, q') = |F(q, q')|^2.
struct JointRate {
    QGrid rows;
    QGrid cols;
    Eigen::MatrixXd values;
};

JointRate two_photon_rate(const BiphotonAmplitude& amplitude);

/// Riemann sum of each row over q' (physical spacing). A "truncation"
/// diagnostic is recorded when the integrand at either q' boundary, times
/// the spacing, exceeds 1e-3 of the largest row sum.
DiffractionPattern one_photon_rate(const JointRate& joint);

/// |F(q_i, q_i)|^2. Requires a square amplitude.
DiffractionPattern diagonal_pattern(const BiphotonAmplitude& amplitude);

/// |F[A](q_i)|^2
DiffractionPattern classical_one_photon(const ApertureSpec& ap, const QGrid& grid);

/// One-photon pattern on `grid`, integrating q' over `integration` and
/// again over integration.doubled() to fill provenance.truncation_residual.
DiffractionPattern one_photon_pattern(const ApertureSpec& ap, const CorrelationKernel& kernel, const QGrid& grid,
                                      const QGrid& integration, const XGrid& quad);

/// One-photon marginal over the entire q' axis, without truncation:
/// Delta gives the constant int A^4 dx / 2pi, Uniform |F[A]|^2 int A^2 dx,
/// Gaussian the position-space sum over `quad`.
DiffractionPattern one_photon_marginal(const ApertureSpec& ap, const CorrelationKernel& kernel, const QGrid& grid,
                                       const XGrid& quad);

/// (max - min) / (max + min) over samples with q in [q_lo, q_hi]. Throws
/// WindowTooSmall when the window is narrower than `min_period` or holds
/// fewer than 8 samples.
double visibility(const DiffractionPattern& pattern, double q_lo, double q_hi, double min_period = 1.0);

/// Relative height, against the global peak, a local maximum needs to count
/// as a principal maximum.
inline constexpr double kPrincipalPeakThreshold = 0.2;

/// Positions of principal maxima refined by 3-point quadratic interpolation.
std::vector<double> principal_peaks(const DiffractionPattern& pattern,
                                    double threshold = kPrincipalPeakThreshold);

/// Mean spacing of consecutive principal maxima. Throws InsufficientPeaks
/// when fewer than two are found.
double peak_spacing(const DiffractionPattern& pattern, double threshold = kPrincipalPeakThreshold);

/// Orders present among the side maxima of a pattern, by position: near an
/// integer, near a half-integer, or neither (within 0.1 normalized units).
struct CombSummary {
    std::vector<double> peaks;
    int integer_orders = 0;
    int half_orders = 0;
    int other = 0;
    /// "none", "integer-orders", "half-orders", "mixed" or "irregular".
    std::string label;
};

inline constexpr double kCombPeakThreshold = 0.1;

/// Classifies the maxima above `threshold` of the peak, ignoring the one
/// within 0.1 of q = 0.
CombSummary classify_comb(const DiffractionPattern& pattern, double threshold = kCombPeakThreshold);

std::string describe(const ApertureSpec& ap);

} // namespace biphoton
