#include "biphoton/oracle.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "biphoton/error.hpp"

namespace biphoton::oracle {

namespace {

void require_grid(const ApertureSpec& ap, const XGrid& quad) {
    if (!quad.covers(ap)) {
        throw CoverageError("oracle grid does not contain the aperture support");
    }
    if (quad.spacing() > ap.slit_width() / kOracleCellsPerSlit) {
        throw ValidationError("x_points", "oracle needs dx <= s/64");
    }
}

// Neumaier summation of complex terms.
class CompensatedSum {
public:
    void add(std::complex<double> v) noexcept {
        add_part(v.real(), re_, re_c_);
        add_part(v.imag(), im_, im_c_);
    }
    std::complex<double> value() const noexcept { return {re_ + re_c_, im_ + im_c_}; }

private:
    static void add_part(double v, double& sum, double& comp) noexcept {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }

    double re_ = 0.0;
    double re_c_ = 0.0;
    double im_ = 0.0;
    double im_c_ = 0.0;
};

} // namespace

std::complex<double> riemann_ft(const ApertureSpec& ap, double q, const XGrid& quad) {
    require_grid(ap, quad);
    std::complex<double> sum{0.0, 0.0};
    for (std::size_t m = 0; m < quad.cell_count(); ++m) {
        const double x = quad.midpoint(m);
        const double a = transmittance(ap, x);
        if (a != 0.0) {
            sum += a * std::exp(std::complex<double>(0.0, q * x));
        }
    }
    return sum * quad.spacing() / std::sqrt(2.0 * std::numbers::pi);
}

std::complex<double> riemann_amplitude(const ApertureSpec& ap, const CorrelationKernel& kernel, double q,
                                       double q_prime, const XGrid& quad) {
    if (kernel.kind() == KernelKind::Delta) {
        throw UnsupportedEvaluation("oracle has no delta double sum; the closed form is the delta reference");
    }
    require_grid(ap, quad);

    std::vector<double> xs;
    std::vector<double> as;
    for (std::size_t m = 0; m < quad.cell_count(); ++m) {
        const double x = quad.midpoint(m);
        const double a = transmittance(ap, x);
        if (a != 0.0) {
            xs.push_back(x);
            as.push_back(a);
        }
    }

    CompensatedSum sum;
    for (std::size_t m = 0; m < xs.size(); ++m) {
        for (std::size_t n = 0; n < xs.size(); ++n) {
            const double weight = as[m] * as[n] * kernel.evaluate(xs[m] - xs[n]);
            sum.add(weight * std::exp(std::complex<double>(0.0, q * xs[m] + q_prime * xs[n])));
        }
    }
    const double dx = quad.spacing();
    return sum.value() * (dx * dx / (2.0 * std::numbers::pi));
}

} // namespace biphoton::oracle
