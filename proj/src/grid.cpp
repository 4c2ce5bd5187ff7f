#include "biphoton/grid.hpp"

#include <cmath>
#include <numbers>

#include "biphoton/aperture.hpp"
#include "biphoton/error.hpp"

namespace biphoton {

XGrid::XGrid(double x_min, double x_max, std::size_t n_points)
    : x_min_(x_min), x_max_(x_max), n_points_(n_points) {
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < x_max)) {
        throw ValidationError("x_range", "x_min must be < x_max");
    }
    if (n_points < 2) {
        throw ValidationError("x_points", "need at least 2 points");
    }
    spacing_ = (x_max - x_min) / static_cast<double>(n_points - 1);
}

XGrid XGrid::covering(const ApertureSpec& ap, std::size_t n_points, double margin) {
    return XGrid(ap.support_left() - margin, ap.support_right() + margin, n_points);
}

bool XGrid::covers(const ApertureSpec& ap) const noexcept {
    const double slack = 1e-12 * ap.support_width();
    return x_min_ <= ap.support_left() + slack && x_max_ >= ap.support_right() - slack;
}

QGrid::QGrid(double q_min, double q_max, std::size_t n_points, double reference_period)
    : q_min_(q_min), q_max_(q_max), n_points_(n_points), reference_period_(reference_period) {
    if (!std::isfinite(q_min) || !std::isfinite(q_max) || !(q_min < q_max)) {
        throw ValidationError("q_range", "q_min must be < q_max");
    }
    if (n_points < 2) {
        throw ValidationError("q_points", "need at least 2 points");
    }
    if (!std::isfinite(reference_period) || reference_period <= 0.0) {
        throw ValidationError("reference_period", "must be > 0");
    }
    spacing_ = (q_max - q_min) / static_cast<double>(n_points - 1);
}

QGrid QGrid::symmetric(double half_range, double spacing, double reference_period) {
    if (!(spacing > 0.0) || !(half_range > 0.0)) {
        throw ValidationError("q_spacing", "half range and spacing must be > 0");
    }
    const auto half_cells = static_cast<std::size_t>(std::ceil(half_range / spacing - 1e-9));
    const double extent = static_cast<double>(half_cells) * spacing;
    return QGrid(-extent, extent, 2 * half_cells + 1, reference_period);
}

double QGrid::unit() const noexcept {
    return 2.0 * std::numbers::pi / reference_period_;
}

double QGrid::wavenumber_spacing() const noexcept {
    return spacing_ * unit();
}

double QGrid::normalized(std::size_t i) const noexcept {
    if (i + 1 == n_points_) {
        return q_max_;
    }
    return q_min_ + static_cast<double>(i) * spacing_;
}

double QGrid::wavenumber(std::size_t i) const noexcept {
    return normalized(i) * unit();
}

std::vector<double> QGrid::normalized_values() const {
    std::vector<double> out(n_points_);
    for (std::size_t i = 0; i < n_points_; ++i) {
        out[i] = normalized(i);
    }
    return out;
}

std::vector<double> QGrid::wavenumbers() const {
    std::vector<double> out(n_points_);
    for (std::size_t i = 0; i < n_points_; ++i) {
        out[i] = wavenumber(i);
    }
    return out;
}

QGrid QGrid::doubled() const {
    const std::size_t cells = n_points_ - 1;
    const std::size_t left = doubled_offset();
    const std::size_t right = cells - left;
    return QGrid(q_min_ - static_cast<double>(left) * spacing_, q_max_ + static_cast<double>(right) * spacing_,
                 n_points_ + cells, reference_period_);
}

} // namespace biphoton
