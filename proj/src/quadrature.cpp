#include "biphoton/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "biphoton/aperture.hpp"
#include "biphoton/correlation.hpp"
#include "biphoton/error.hpp"
#include "biphoton/grid.hpp"

namespace biphoton {

namespace {

// Columns per block; bounds the n_nodes x block scratch matrices.
constexpr std::ptrdiff_t kBlock = 512;

constexpr double kInvTwoPi = 0.5 / std::numbers::pi;

Eigen::MatrixXd kernel_matrix(const QuadratureNodes& nodes, const CorrelationKernel& kernel) {
    if (kernel.kind() == KernelKind::Delta) {
        throw UnsupportedEvaluation("dense quadrature needs a pointwise kernel; delta uses the closed form");
    }
    const auto n = static_cast<Eigen::Index>(nodes.size());
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        k(j, j) = kernel.evaluate(0.0);
        for (Eigen::Index i = j + 1; i < n; ++i) {
            const double g = kernel.evaluate(nodes.x[i] - nodes.x[j]);
            k(i, j) = g;
            k(j, i) = g;
        }
    }
    return k;
}

// E(m, j) = w_m exp(i q_j x_m)
Eigen::MatrixXcd phase_matrix(const QuadratureNodes& nodes, std::span<const double> q) {
    const auto n = static_cast<Eigen::Index>(nodes.size());
    Eigen::MatrixXcd e(n, static_cast<Eigen::Index>(q.size()));
    for (Eigen::Index j = 0; j < e.cols(); ++j) {
        for (Eigen::Index m = 0; m < n; ++m) {
            e(m, j) = std::polar(nodes.weight(m), q[j] * nodes.x[m]);
        }
    }
    return e;
}

// K * E with a real K, done as two real products.
Eigen::MatrixXcd apply_kernel(const Eigen::MatrixXd& k, const Eigen::MatrixXcd& e) {
    const Eigen::MatrixXd re = k * e.real();
    const Eigen::MatrixXd im = k * e.imag();
    Eigen::MatrixXcd out(e.rows(), e.cols());
    out.real() = re;
    out.imag() = im;
    return out;
}

} // namespace

QuadratureNodes midpoint_nodes(const ApertureSpec& ap, const XGrid& grid) {
    QuadratureNodes nodes;
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        const double x = grid.midpoint(c);
        const double a = transmittance(ap, x);
        if (a != 0.0) {
            nodes.x.push_back(x);
            nodes.amplitude.push_back(a);
            nodes.width.push_back(grid.spacing());
        }
    }
    return nodes;
}

QuadratureNodes slit_nodes(const ApertureSpec& ap, std::size_t per_slit) {
    if (per_slit == 0) {
        throw ValidationError("per_slit", "need at least one node per slit");
    }
    // Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix, weights
    // 2 v_0^2 from the normalized eigenvectors.
    const auto n = static_cast<Eigen::Index>(per_slit);
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index k = 1; k < n; ++k) {
        const double b = static_cast<double>(k) / std::sqrt(4.0 * static_cast<double>(k * k) - 1.0);
        jacobi(k, k - 1) = b;
        jacobi(k - 1, k) = b;
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    const Eigen::VectorXd& t = solver.eigenvalues();
    const Eigen::VectorXd w = 2.0 * solver.eigenvectors().row(0).transpose().cwiseAbs2();

    QuadratureNodes nodes;
    const double half = 0.5 * ap.slit_width();
    const auto total = static_cast<std::size_t>(ap.slit_count()) * per_slit;
    nodes.x.reserve(total);
    nodes.width.reserve(total);
    nodes.amplitude.assign(total, ap.amplitude());
    for (int m = 0; m < ap.slit_count(); ++m) {
        const double mid = ap.slit_left(m) + half;
        for (Eigen::Index j = 0; j < n; ++j) {
            nodes.x.push_back(mid + half * t[j]);
            nodes.width.push_back(half * w[j]);
        }
    }
    return nodes;
}

Eigen::MatrixXcd dense_amplitude(const QuadratureNodes& nodes, const CorrelationKernel& kernel,
                                 std::span<const double> rows, std::span<const double> cols) {
    const Eigen::MatrixXd k = kernel_matrix(nodes, kernel);
    const Eigen::MatrixXcd e_rows = phase_matrix(nodes, rows);
    const auto n_rows = static_cast<Eigen::Index>(rows.size());
    const auto n_cols = static_cast<Eigen::Index>(cols.size());

    Eigen::MatrixXcd f(n_rows, n_cols);
    for (Eigen::Index start = 0; start < n_cols; start += kBlock) {
        const Eigen::Index width = std::min<Eigen::Index>(kBlock, n_cols - start);
        const Eigen::MatrixXcd h = apply_kernel(k, phase_matrix(nodes, cols.subspan(start, width)));
        f.middleCols(start, width).noalias() = e_rows.transpose() * h;
    }
    f *= kInvTwoPi;
    return f;
}

std::vector<std::complex<double>> dense_diagonal(const QuadratureNodes& nodes, const CorrelationKernel& kernel,
                                                 std::span<const double> q) {
    const Eigen::MatrixXd k = kernel_matrix(nodes, kernel);
    std::vector<std::complex<double>> out(q.size());
    const auto n = static_cast<Eigen::Index>(q.size());
    for (Eigen::Index start = 0; start < n; start += kBlock) {
        const Eigen::Index width = std::min<Eigen::Index>(kBlock, n - start);
        const Eigen::MatrixXcd e = phase_matrix(nodes, q.subspan(start, width));
        const Eigen::MatrixXcd h = apply_kernel(k, e);
        for (Eigen::Index j = 0; j < width; ++j) {
            out[start + j] = kInvTwoPi * (e.col(j).transpose() * h.col(j))(0, 0);
        }
    }
    return out;
}

std::vector<double> dense_marginal(const QuadratureNodes& nodes, const CorrelationKernel& kernel,
                                   std::span<const double> q) {
    const Eigen::MatrixXd k = kernel_matrix(nodes, kernel);
    Eigen::VectorXd density(static_cast<Eigen::Index>(nodes.size()));
    for (std::size_t m = 0; m < nodes.size(); ++m) {
        density[static_cast<Eigen::Index>(m)] = nodes.amplitude[m] * nodes.amplitude[m] * nodes.width[m];
    }
    std::vector<double> out(q.size());
    const auto n = static_cast<Eigen::Index>(q.size());
    for (Eigen::Index start = 0; start < n; start += kBlock) {
        const Eigen::Index width = std::min<Eigen::Index>(kBlock, n - start);
        const Eigen::MatrixXcd h = apply_kernel(k, phase_matrix(nodes, q.subspan(start, width)));
        for (Eigen::Index j = 0; j < width; ++j) {
            out[start + j] = kInvTwoPi * density.dot(h.col(j).cwiseAbs2());
        }
    }
    return out;
}

} // namespace biphoton
