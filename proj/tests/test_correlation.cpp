#include <doctest.h>

#include <cmath>
#include <random>

#include "biphoton/correlation.hpp"
#include "biphoton/error.hpp"

using namespace biphoton;

TEST_CASE("uniform kernel is 1 everywhere") {
    const auto k = CorrelationKernel::uniform();
    CHECK(k.evaluate(7.3) == 1.0);
    CHECK(k.evaluate(0.0) == 1.0);
    CHECK(k.evaluate(-1e6) == 1.0);
    CHECK_FALSE(k.width().has_value());
}

TEST_CASE("Gaussian kernel with the measured width") {
    const auto k = CorrelationKernel::gaussian(kMeasuredCorrelationWidth);
    CHECK(k.evaluate(0.0) == 1.0);
    CHECK(k.evaluate(0.56) == doctest::Approx(0.367879441171442321596).epsilon(1e-15));
    CHECK(k.evaluate(-0.56) == k.evaluate(0.56));
    CHECK(*k.width() == 0.56);
}

TEST_CASE("kernel validation and the symbolic delta") {
    CHECK_THROWS_AS(CorrelationKernel::gaussian(0.0), ValidationError);
    CHECK_THROWS_AS(CorrelationKernel::gaussian(-1.0), ValidationError);
    CHECK_THROWS_AS(CorrelationKernel::delta().evaluate(0.0), UnsupportedEvaluation);
    CHECK(parse_kernel_kind("Gaussian") == KernelKind::Gaussian);
    CHECK(parse_kernel_kind("delta") == KernelKind::Delta);
    CHECK_THROWS_AS(parse_kernel_kind("lorentzian"), ValidationError);
}

TEST_CASE("property: kernels are even, bounded by 1 and peak at zero") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> width(1e-3, 1e3);
    std::uniform_real_distribution<double> offset(-5.0, 5.0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto k = CorrelationKernel::gaussian(width(rng));
        const auto u = CorrelationKernel::uniform();
        const double dx = offset(rng);
        CHECK(k.evaluate(dx) == k.evaluate(-dx));
        CHECK(k.evaluate(dx) <= 1.0);
        CHECK(k.evaluate(dx) >= 0.0);
        CHECK(u.evaluate(dx) == u.evaluate(-dx));
        // Strict positivity holds until exp underflows.
        if (std::abs(dx / *k.width()) < 20.0) {
            CHECK(k.evaluate(dx) > 0.0);
        }
    }
}
