#pragma once

#include <complex>

namespace biphoton {

/// Rectangular N-slit transmission grating.
///
/// Lengths are dimensionless; the library convention is that they are
/// expressed in units of a reference grating period (so the nominal period
/// is 1). Slit m (0-based) occupies the half-open interval
/// [slit_left(m), slit_left(m) + slit_width) and transmits `amplitude`.
/// The slit array is symmetric about `center_offset`.
class ApertureSpec {
public:
    double period() const noexcept { return period_; }
    double slit_width() const noexcept { return slit_width_; }
    int slit_count() const noexcept { return slit_count_; }
    double amplitude() const noexcept { return amplitude_; }
    double center_offset() const noexcept { return center_offset_; }

    /// (N-1)d + s
    double support_width() const noexcept;
    double support_left() const noexcept;
    double support_right() const noexcept;
    double slit_left(int m) const noexcept;

    /// d/s
    double open_ratio() const noexcept { return period_ / slit_width_; }

    friend ApertureSpec make_grating(double period, double slit_width, int slit_count, double amplitude,
                                     double center_offset);

private:
    ApertureSpec() = default;

    double period_ = 1.0;
    double slit_width_ = 0.5;
    int slit_count_ = 1;
    double amplitude_ = 1.0;
    double center_offset_ = 0.0;
};

/// Validates and builds a grating. Throws ValidationError naming the field
/// ("period", "slit_width", "slit_count", "amplitude", "center_offset").
ApertureSpec make_grating(double period, double slit_width, int slit_count, double amplitude = 1.0,
                          double center_offset = 0.0);

/// A(x): amplitude inside a slit, 0 elsewhere.
double transmittance(const ApertureSpec& ap, double x) noexcept;

/// Closed-form Fourier transform of A(x) with the e^{+iqx} convention and
/// 1/sqrt(2 pi) normalization. `q` is a physical wave number (1/length).
std::complex<double> analytic_ft(const ApertureSpec& ap, double q) noexcept;

/// Fourier transform of A(x)^2. Same support, amplitude squared.
std::complex<double> analytic_ft_squared(const ApertureSpec& ap, double q) noexcept;

/// sin(N t)/sin(t) with the removable singularities at t = k pi resolved.
double dirichlet_factor(int n, double t) noexcept;

} // namespace biphoton
