#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace biphoton {

class ApertureSpec;
class CorrelationKernel;
class XGrid;

/// Sample positions of the aperture integrals, restricted to open cells.
/// Each node contributes amplitude * width to a one-dimensional sum.
struct QuadratureNodes {
    std::vector<double> x;
    std::vector<double> amplitude;
    std::vector<double> width;

    std::size_t size() const noexcept { return x.size(); }
    double weight(std::size_t i) const noexcept { return amplitude[i] * width[i]; }
};

/// Midpoints of the XGrid cells where A(x) != 0.
QuadratureNodes midpoint_nodes(const ApertureSpec& ap, const XGrid& grid);

/// Gauss-Legendre rule with `per_slit` nodes on each slit. Nodes move
/// continuously with the grating geometry.
QuadratureNodes slit_nodes(const ApertureSpec& ap, std::size_t per_slit);

/// (1/2pi) sum_mn w_m w_n G(x_m - x_n) exp(i(q x_m + q' x_n)) with q over
/// `rows` and q' over `cols` (physical wave numbers). Kernel must not be
/// delta.
Eigen::MatrixXcd dense_amplitude(const QuadratureNodes& nodes, const CorrelationKernel& kernel,
                                 std::span<const double> rows, std::span<const double> cols);

/// F(q, q) of `dense_amplitude` for each q.
std::vector<std::complex<double>> dense_diagonal(const QuadratureNodes& nodes, const CorrelationKernel& kernel,
                                                 std::span<const double> q);

/// One-photon marginal over the whole q' axis, evaluated in position space:
/// (1/2pi) sum_n A_n^2 dx_n |sum_m w_m G(x_m - x_n) exp(i q x_m)|^2.
std::vector<double> dense_marginal(const QuadratureNodes& nodes, const CorrelationKernel& kernel,
                                   std::span<const double> q);

} // namespace biphoton
