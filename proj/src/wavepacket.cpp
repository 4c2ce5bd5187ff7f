#include "biphoton/wavepacket.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "biphoton/quadrature.hpp"

namespace biphoton {

void check_quadrature(const ApertureSpec& ap, const XGrid& quad, Diagnostics& diagnostics) {
    if (!quad.covers(ap)) {
        std::ostringstream msg;
        msg << "quadrature grid [" << quad.x_min() << ", " << quad.x_max() << "] does not contain the aperture support ["
            << ap.support_left() << ", " << ap.support_right() << "]";
        throw CoverageError(msg.str());
    }
    if (quad.spacing() > ap.slit_width() / kMinCellsPerSlit) {
        std::ostringstream msg;
        msg << "x spacing " << quad.spacing() << " exceeds s/" << kMinCellsPerSlit << " = "
            << ap.slit_width() / kMinCellsPerSlit;
        diagnostics.push_back({"resolution", msg.str()});
    }
}

std::complex<double> amplitude_delta(const ApertureSpec& ap, double q_sum) noexcept {
    return analytic_ft_squared(ap, q_sum) / std::sqrt(2.0 * std::numbers::pi);
}

std::complex<double> amplitude_separable(const ApertureSpec& ap, double q, double q_prime) noexcept {
    return analytic_ft(ap, q) * analytic_ft(ap, q_prime);
}

BiphotonAmplitude biphoton_amplitude(const ApertureSpec& ap, const CorrelationKernel& kernel, const QGrid& grid,
                                     const XGrid& quad) {
    return biphoton_amplitude(ap, kernel, grid, grid, quad);
}

BiphotonAmplitude biphoton_amplitude(const ApertureSpec& ap, const CorrelationKernel& kernel, const QGrid& rows,
                                     const QGrid& cols, const XGrid& quad) {
    BiphotonAmplitude out{rows, cols, {}, kernel.kind(), {}};
    check_quadrature(ap, quad, out.diagnostics);

    const auto n_rows = static_cast<Eigen::Index>(rows.size());
    const auto n_cols = static_cast<Eigen::Index>(cols.size());

    switch (kernel.kind()) {
    case KernelKind::Delta: {
        out.values.resize(n_rows, n_cols);
        if (rows.spacing() == cols.spacing() && rows.reference_period() == cols.reference_period()) {
            // One evaluation per anti-diagonal so entries with equal i + j
            // are bitwise identical.
            const double base = (rows.q_min() + cols.q_min()) * rows.unit();
            const double step = rows.wavenumber_spacing();
            std::vector<std::complex<double>> by_sum(static_cast<std::size_t>(n_rows + n_cols - 1));
            for (std::size_t k = 0; k < by_sum.size(); ++k) {
                by_sum[k] = amplitude_delta(ap, base + static_cast<double>(k) * step);
            }
            for (Eigen::Index i = 0; i < n_rows; ++i) {
                for (Eigen::Index j = 0; j < n_cols; ++j) {
                    out.values(i, j) = by_sum[static_cast<std::size_t>(i + j)];
                }
            }
        } else {
            for (Eigen::Index i = 0; i < n_rows; ++i) {
                for (Eigen::Index j = 0; j < n_cols; ++j) {
                    out.values(i, j) = amplitude_delta(ap, rows.wavenumber(i) + cols.wavenumber(j));
                }
            }
        }
        break;
    }
    case KernelKind::Uniform: {
        Eigen::VectorXcd f_rows(n_rows);
        Eigen::VectorXcd f_cols(n_cols);
        for (Eigen::Index i = 0; i < n_rows; ++i) {
            f_rows[i] = analytic_ft(ap, rows.wavenumber(i));
        }
        for (Eigen::Index j = 0; j < n_cols; ++j) {
            f_cols[j] = analytic_ft(ap, cols.wavenumber(j));
        }
        out.values = f_rows * f_cols.transpose();
        break;
    }
    case KernelKind::Gaussian: {
        const auto q_rows = rows.wavenumbers();
        const auto q_cols = cols.wavenumbers();
        out.values = dense_amplitude(midpoint_nodes(ap, quad), kernel, q_rows, q_cols);
        break;
    }
    }
    return out;
}

} // namespace biphoton
