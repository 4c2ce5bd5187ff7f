#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace biphoton {

enum class KernelKind { Delta, Uniform, Gaussian };

std::string_view to_string(KernelKind kind) noexcept;
/// Accepts "delta", "uniform", "gaussian" (case-insensitive).
KernelKind parse_kernel_kind(std::string_view text);

/// Transverse correlation G(x - x') between the two photons of a pair.
///
/// Delta is symbolic: it has no pointwise value and is consumed through the
/// closed-form reduction of the wave packet. Gaussian is exp(-(dx/w)^2) with
/// unit peak.
class CorrelationKernel {
public:
    static CorrelationKernel delta() noexcept { return CorrelationKernel(KernelKind::Delta, 0.0); }
    static CorrelationKernel uniform() noexcept { return CorrelationKernel(KernelKind::Uniform, 0.0); }
    /// Throws ValidationError("w", ...) unless width > 0.
    static CorrelationKernel gaussian(double width);

    KernelKind kind() const noexcept { return kind_; }
    std::optional<double> width() const noexcept;

    /// Throws UnsupportedEvaluation for the delta kernel.
    double evaluate(double dx) const;

    std::string describe() const;

private:
    CorrelationKernel(KernelKind kind, double width) noexcept : kind_(kind), width_(width) {}

    KernelKind kind_;
    double width_;
};

/// Width used to reproduce the intermediate-correlation measurements, in
/// units of the grating period.
inline constexpr double kMeasuredCorrelationWidth = 0.56;

} // namespace biphoton
