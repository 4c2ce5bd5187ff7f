#include "biphoton/correlation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "biphoton/error.hpp"

namespace biphoton {

std::string_view to_string(KernelKind kind) noexcept {
    switch (kind) {
    case KernelKind::Delta:
        return "delta";
    case KernelKind::Uniform:
        return "uniform";
    case KernelKind::Gaussian:
        return "gaussian";
    }
    return "unknown";
}

KernelKind parse_kernel_kind(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "delta") {
        return KernelKind::Delta;
    }
    if (lower == "uniform") {
        return KernelKind::Uniform;
    }
    if (lower == "gaussian") {
        return KernelKind::Gaussian;
    }
    throw ValidationError("kernel", "unknown kernel kind '" + std::string(text) + "' (delta, uniform, gaussian)");
}

CorrelationKernel CorrelationKernel::gaussian(double width) {
    if (!std::isfinite(width) || width <= 0.0) {
        throw ValidationError("w", "Gaussian correlation width must be finite and > 0");
    }
    return CorrelationKernel(KernelKind::Gaussian, width);
}

std::optional<double> CorrelationKernel::width() const noexcept {
    if (kind_ == KernelKind::Gaussian) {
        return width_;
    }
    return std::nullopt;
}

double CorrelationKernel::evaluate(double dx) const {
    switch (kind_) {
    case KernelKind::Delta:
        throw UnsupportedEvaluation("delta kernel has no pointwise value; use the closed-form delta amplitude");
    case KernelKind::Uniform:
        return 1.0;
    case KernelKind::Gaussian: {
        const double r = dx / width_;
        return std::exp(-r * r);
    }
    }
    return 0.0;
}

std::string CorrelationKernel::describe() const {
    std::ostringstream out;
    out << to_string(kind_);
    if (kind_ == KernelKind::Gaussian) {
        out << "(w=" << width_ << ")";
    }
    return out.str();
}

} // namespace biphoton
