#pragma once

#include <cstddef>
#include <vector>

namespace biphoton {

class ApertureSpec;

/// Uniform grid on [x_min, x_max] with n_points nodes. Quadrature uses the
/// midpoints of the n_points - 1 cells.
class XGrid {
public:
    /// Throws ValidationError unless x_min < x_max and n_points >= 2.
    XGrid(double x_min, double x_max, std::size_t n_points);

    /// Grid spanning the aperture support plus `margin` on each side.
    static XGrid covering(const ApertureSpec& ap, std::size_t n_points, double margin = 0.0);

    double x_min() const noexcept { return x_min_; }
    double x_max() const noexcept { return x_max_; }
    std::size_t n_points() const noexcept { return n_points_; }
    std::size_t cell_count() const noexcept { return n_points_ - 1; }
    double spacing() const noexcept { return spacing_; }
    double midpoint(std::size_t cell) const noexcept { return x_min_ + (static_cast<double>(cell) + 0.5) * spacing_; }

    /// Same extent with twice as many cells.
    XGrid refined() const { return XGrid(x_min_, x_max_, 2 * n_points_ - 1); }

    /// True when [x_min, x_max] contains the aperture support (with a
    /// relative slack of 1e-12 of the support width for rounding).
    bool covers(const ApertureSpec& ap) const noexcept;

private:
    double x_min_;
    double x_max_;
    std::size_t n_points_;
    double spacing_;
};

/// Uniform grid of transverse wave numbers stored in normalized units of
/// 2 pi / reference_period. `wavenumber(i)` converts to 1/length.
class QGrid {
public:
    /// Throws ValidationError unless q_min < q_max, n_points >= 2 and the
    /// reference period is positive.
    QGrid(double q_min, double q_max, std::size_t n_points, double reference_period = 1.0);

    /// Grid with the given normalized spacing, symmetric about zero, whose
    /// half-range is at least `half_range`.
    static QGrid symmetric(double half_range, double spacing, double reference_period = 1.0);

    double q_min() const noexcept { return q_min_; }
    double q_max() const noexcept { return q_max_; }
    std::size_t size() const noexcept { return n_points_; }
    double reference_period() const noexcept { return reference_period_; }

    /// Normalized spacing.
    double spacing() const noexcept { return spacing_; }
    /// Spacing in 1/length.
    double wavenumber_spacing() const noexcept;

    double normalized(std::size_t i) const noexcept;
    double wavenumber(std::size_t i) const noexcept;

    std::vector<double> normalized_values() const;
    std::vector<double> wavenumbers() const;

    /// Normalized-to-physical factor 2 pi / reference_period.
    double unit() const noexcept;

    /// Same spacing, range extended by (n-1)/2 cells on each side (the left
    /// side takes the extra cell when n-1 is odd). The original node i maps
    /// to index i + doubled_offset() in the result.
    QGrid doubled() const;
    std::size_t doubled_offset() const noexcept { return n_points_ / 2; }

    friend bool operator==(const QGrid&, const QGrid&) = default;

private:
    double q_min_;
    double q_max_;
    std::size_t n_points_;
    double reference_period_;
    double spacing_;
};

} // namespace biphoton
