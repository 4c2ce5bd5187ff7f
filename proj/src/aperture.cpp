#include "biphoton/aperture.hpp"

#include <cmath>
#include <numbers>

#include "biphoton/error.hpp"

namespace biphoton {

namespace {

constexpr double kSingularSin = 1e-9;
constexpr double kSmallQ = 1e-9;

std::complex<double> grating_transform(const ApertureSpec& ap, double amplitude, double q) noexcept {
    const double d = ap.period();
    const double s = ap.slit_width();

    // Single-slit envelope sin(sq/2)/(q/2), limit s at q -> 0.
    const double envelope = std::abs(q) < kSmallQ * (2.0 * std::numbers::pi / d)
                                ? s
                                : std::sin(0.5 * s * q) / (0.5 * q);

    const double real = amplitude / std::sqrt(2.0 * std::numbers::pi) * dirichlet_factor(ap.slit_count(), 0.5 * d * q) *
                        envelope;
    if (ap.center_offset() == 0.0) {
        return {real, 0.0};
    }
    return std::polar(1.0, q * ap.center_offset()) * real;
}

} // namespace

double ApertureSpec::support_width() const noexcept {
    return (slit_count_ - 1) * period_ + slit_width_;
}

double ApertureSpec::support_left() const noexcept {
    return center_offset_ - 0.5 * support_width();
}

double ApertureSpec::support_right() const noexcept {
    return support_left() + support_width();
}

double ApertureSpec::slit_left(int m) const noexcept {
    return support_left() + m * period_;
}

ApertureSpec make_grating(double period, double slit_width, int slit_count, double amplitude, double center_offset) {
    if (!std::isfinite(period) || period <= 0.0) {
        throw ValidationError("period", "must be finite and > 0");
    }
    if (!std::isfinite(slit_width) || slit_width <= 0.0) {
        throw ValidationError("slit_width", "must be finite and > 0");
    }
    if (slit_width > period) {
        throw ValidationError("slit_width", "must not exceed the period (s <= d)");
    }
    if (slit_count < 1) {
        throw ValidationError("slit_count", "must be >= 1");
    }
    if (!std::isfinite(amplitude) || amplitude <= 0.0) {
        throw ValidationError("amplitude", "must be finite and > 0");
    }
    if (!std::isfinite(center_offset)) {
        throw ValidationError("center_offset", "must be finite");
    }
    ApertureSpec ap;
    ap.period_ = period;
    ap.slit_width_ = slit_width;
    ap.slit_count_ = slit_count;
    ap.amplitude_ = amplitude;
    ap.center_offset_ = center_offset;
    return ap;
}

double transmittance(const ApertureSpec& ap, double x) noexcept {
    const double offset = x - ap.support_left();
    if (!(offset >= -ap.period()) || offset > ap.support_width() + ap.period()) {
        return 0.0;
    }
    // floor() may land one slit off right at an edge; test neighbours against
    // the same edge expressions slit_left() produces.
    const int guess = static_cast<int>(std::floor(offset / ap.period()));
    for (int m = guess - 1; m <= guess + 1; ++m) {
        if (m < 0 || m >= ap.slit_count()) {
            continue;
        }
        const double left = ap.slit_left(m);
        if (x >= left && x < left + ap.slit_width()) {
            return ap.amplitude();
        }
    }
    return 0.0;
}

double dirichlet_factor(int n, double t) noexcept {
    const double sin_t = std::sin(t);
    if (std::abs(sin_t) < kSingularSin) {
        // t = k pi: limit is N cos(N k pi)/cos(k pi) = N (-1)^{k(N-1)}.
        const long long k = std::llround(t / std::numbers::pi);
        const bool odd = ((k % 2) != 0) && ((n - 1) % 2 != 0);
        return odd ? -static_cast<double>(n) : static_cast<double>(n);
    }
    return std::sin(n * t) / sin_t;
}

std::complex<double> analytic_ft(const ApertureSpec& ap, double q) noexcept {
    return grating_transform(ap, ap.amplitude(), q);
}

std::complex<double> analytic_ft_squared(const ApertureSpec& ap, double q) noexcept {
    return grating_transform(ap, ap.amplitude() * ap.amplitude(), q);
}

} // namespace biphoton
