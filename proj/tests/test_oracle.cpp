#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "biphoton/error.hpp"
#include "biphoton/oracle.hpp"
#include "biphoton/wavepacket.hpp"

using namespace biphoton;

namespace {

constexpr double kPi = std::numbers::pi;

} // namespace

TEST_CASE("riemann_ft at q = 0 is within one edge cell of N s A0 / sqrt(2 pi)") {
    const auto ap = make_grating(1.0, 0.5, 20, 1.4);
    const double exact = 1.4 * 20 * 0.5 / std::sqrt(2.0 * kPi);
    // Unaligned grid: each slit gains or loses less than one cell.
    const XGrid quad(-10.3, 10.1, 3001);
    const auto v = oracle::riemann_ft(ap, 0.0, quad);
    CHECK(std::abs(v - exact) <= 20 * quad.spacing() * 1.4 / std::sqrt(2.0 * kPi));
}

TEST_CASE("riemann_ft rejects coarse or short grids") {
    const auto ap = make_grating(1.0, 0.5, 4, 1.0);
    CHECK_THROWS_AS(oracle::riemann_ft(ap, 0.0, XGrid::covering(ap, 100)), ValidationError);
    CHECK_THROWS_AS(oracle::riemann_ft(ap, 0.0, XGrid(-1.0, 1.0, 2000)), CoverageError);
    CHECK_THROWS_AS(oracle::riemann_amplitude(ap, CorrelationKernel::delta(), 0.0, 0.0, XGrid::covering(ap, 2000)),
                    UnsupportedEvaluation);
}

TEST_CASE("extrapolated riemann_ft matches analytic_ft at random q") {
    const auto ap = make_grating(1.0, 0.5, 20, 1.0);
    const XGrid coarse = XGrid::covering(ap, 39 * 256 + 1);
    const XGrid fine = coarse.refined();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-16.0 * kPi, 16.0 * kPi);
    for (int t = 0; t < 50; ++t) {
        const double q = dist(rng);
        const auto expected = analytic_ft(ap, q);
        const auto estimate =
            oracle::richardson(oracle::riemann_ft(ap, q, coarse), oracle::riemann_ft(ap, q, fine), 2);
        CAPTURE(q);
        CHECK(std::abs(estimate - expected) <= 1e-6 * std::max(std::abs(expected), 1e-3));
    }
}

TEST_CASE("riemann_ft is unchanged by extra margin") {
    const auto ap = make_grating(1.0, 0.5, 6, 1.0);
    const double dx = ap.slit_width() / 64.0;
    const XGrid tight = XGrid::covering(ap, 11 * 64 + 1);
    const XGrid padded = XGrid::covering(ap, 11 * 64 + 2 * 128 + 1, 128 * dx);
    const XGrid wider = XGrid::covering(ap, 11 * 64 + 4 * 128 + 1, 256 * dx);
    for (double q : {0.0, 1.0, 5.5, -13.0}) {
        const auto a = oracle::riemann_ft(ap, q, tight);
        CHECK(std::abs(oracle::riemann_ft(ap, q, padded) - a) <= 1e-12 * (1.0 + std::abs(a)));
        CHECK(std::abs(oracle::riemann_ft(ap, q, wider) - a) <= 1e-12 * (1.0 + std::abs(a)));
    }
}

TEST_CASE("riemann_amplitude with the uniform kernel factorizes") {
    const auto ap = make_grating(1.0, 0.5, 5, 1.0);
    const XGrid quad = XGrid::covering(ap, 9 * 64 + 1);
    for (auto [q, qp] : {std::pair{0.0, 0.0}, {1.2, -0.4}, {2.0 * kPi, -2.0 * kPi}, {3.3, 7.1}}) {
        const auto joint = oracle::riemann_amplitude(ap, CorrelationKernel::uniform(), q, qp, quad);
        const auto product = oracle::riemann_ft(ap, q, quad) * oracle::riemann_ft(ap, qp, quad);
        CHECK(std::abs(joint - product) <= 1e-12 * std::abs(product));
    }
}

TEST_CASE("riemann_amplitude at the origin agrees with the fast path") {
    const auto ap = make_grating(1.0, 0.5, 20, 1.0);
    const auto kernel = CorrelationKernel::gaussian(kMeasuredCorrelationWidth);
    const XGrid quad = XGrid::covering(ap, 4096);
    const auto fast = biphoton_amplitude(ap, kernel, QGrid(-1.0, 1.0, 3), quad);
    const auto reference = oracle::riemann_amplitude(ap, kernel, 0.0, 0.0, quad);
    CHECK(std::abs(fast.values(1, 1) - reference) <= 1e-12 * std::abs(reference));
}

TEST_CASE("riemann_amplitude approaches the uniform value for very wide kernels") {
    const auto ap = make_grating(1.0, 0.5, 20, 1.0);
    const XGrid quad = XGrid::covering(ap, 4096);
    const double q = 2.0 * kPi;
    const auto uniform = oracle::riemann_amplitude(ap, CorrelationKernel::uniform(), q, -q, quad);
    const auto wide = oracle::riemann_amplitude(ap, CorrelationKernel::gaussian(1e3 * 20), q, -q, quad);
    CHECK(std::abs(wide - uniform) <= 1e-3 * std::abs(uniform));
}

TEST_CASE("riemann_amplitude converges under grid refinement") {
    // Declared tolerance for the Cauchy check between successive halvings.
    constexpr double kTolerance = 2e-3;
    const auto ap = make_grating(1.0, 0.5, 6, 1.0);
    const auto kernel = CorrelationKernel::gaussian(kMeasuredCorrelationWidth);
    const XGrid coarse = XGrid::covering(ap, 11 * 64 + 1);
    const XGrid fine = coarse.refined();
    for (auto [q, qp] : {std::pair{0.0, 0.0}, {2.0 * kPi, 0.0}, {kPi, -kPi}, {3.0 * kPi, kPi}}) {
        const auto a = oracle::riemann_amplitude(ap, kernel, q, qp, coarse);
        const auto b = oracle::riemann_amplitude(ap, kernel, q, qp, fine);
        CAPTURE(q);
        CAPTURE(qp);
        CHECK(std::abs(a - b) < kTolerance * std::abs(b));
    }
}

TEST_CASE("richardson removes the leading error term") {
    // f(h) = 1 + h^2 exactly.
    CHECK(oracle::richardson(1.0 + 0.04, 1.0 + 0.01, 2) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(oracle::richardson(1.0 + 0.2, 1.0 + 0.1, 1) == doctest::Approx(1.0).epsilon(1e-15));
}
