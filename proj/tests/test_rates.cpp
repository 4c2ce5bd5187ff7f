#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "biphoton/rates.hpp"

using namespace biphoton;

namespace {

constexpr double kPi = std::numbers::pi;

ApertureSpec reference_grating() {
    return make_grating(1.0, 0.5, 20, 1.0);
}

XGrid default_quad(const ApertureSpec& ap) {
    return XGrid::covering(ap, 4096);
}

bool non_negative(const DiffractionPattern& p) {
    return std::all_of(p.intensity.begin(), p.intensity.end(), [](double v) { return v >= 0.0 && std::isfinite(v); });
}

} // namespace

TEST_CASE("parse detection and normalization") {
    CHECK(parse_detection("one-photon") == Detection::OnePhoton);
    CHECK(parse_detection("Diagonal") == Detection::TwoPhotonDiagonal);
    CHECK(parse_normalization("peak") == Normalization::PeakNormalized);
    CHECK_THROWS_AS(parse_detection("three"), ValidationError);
    CHECK_THROWS_AS(parse_normalization("log"), ValidationError);
}

TEST_CASE("validate patterns") {
    DiffractionPattern p{{0.0, 1.0}, {1.0, 0.5}};
    CHECK_NOTHROW(validate(p));
    p.intensity[1] = -0.1;
    CHECK_THROWS_AS(validate(p), ValidationError);
    p.intensity = {2.0, 1.0};
    p.normalization = Normalization::PeakNormalized;
    CHECK_THROWS_AS(validate(p), ValidationError);
    CHECK_NOTHROW(validate(peak_normalized(p)));
    CHECK_THROWS_AS(validate(DiffractionPattern{{0.0}, {1.0}}), ValidationError);
}

TEST_CASE("delta diagonal is proportional to |F[A^2](2q)|^2") {
    const auto ap = reference_grating();
    const QGrid grid(-4.0, 4.0, 801);
    const auto pattern = diagonal_pattern(biphoton_amplitude(ap, CorrelationKernel::delta(), grid, default_quad(ap)));
    const double peak = *std::max_element(pattern.intensity.begin(), pattern.intensity.end());

    std::vector<double> ratios;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (pattern.intensity[i] < 1e-6 * peak) {
            continue;
        }
        ratios.push_back(pattern.intensity[i] / std::norm(analytic_ft_squared(ap, 2.0 * grid.wavenumber(i))));
    }
    REQUIRE(ratios.size() > 100);
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    CHECK((*hi - *lo) / *lo <= 1e-9);
    CHECK(*lo == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-12));
}

TEST_CASE("delta diagonal peaks sit at half the classical spacing") {
    const auto ap = reference_grating();
    const QGrid grid(-2.5, 2.5, 501);
    const auto quad = default_quad(ap);
    const auto delta = diagonal_pattern(biphoton_amplitude(ap, CorrelationKernel::delta(), grid, quad));
    const auto classical = classical_one_photon(ap, grid);
    const double ratio = peak_spacing(delta) / peak_spacing(classical);
    CHECK(ratio == doctest::Approx(0.5).epsilon(0.02));
    CHECK(peak_spacing(classical) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(non_negative(delta));
}

TEST_CASE("classical pattern: principal maxima at integers, even orders missing for d/s = 2") {
    const auto ap = reference_grating();
    const QGrid grid(-3.0, 3.0, 601);
    const auto p = classical_one_photon(ap, grid);
    const double peak = p.intensity[300];
    CHECK(peak == *std::max_element(p.intensity.begin(), p.intensity.end()));
    CHECK(peak == doctest::Approx(std::pow(20 * 0.5, 2) / (2.0 * kPi)).epsilon(1e-12));
    // q = +-2 is the second order and falls on the envelope zero.
    CHECK(p.intensity[100] <= 1e-20 * peak);
    CHECK(p.intensity[500] <= 1e-20 * peak);
    // First orders carry (2 / pi)^2 of the peak.
    CHECK(p.intensity[200] / peak == doctest::Approx(4.0 / (kPi * kPi)).epsilon(1e-12));
    // Dirichlet zeros between orders at q = k / N.
    CHECK(p.intensity[305] <= 1e-20 * peak);

    const auto peaks = principal_peaks(p);
    // Third orders carry 4 / (9 pi^2) of the peak, below the threshold.
    REQUIRE(peaks.size() == 3);
    for (std::size_t k = 0; k < peaks.size(); ++k) {
        const double expected = std::vector<double>{-1.0, 0.0, 1.0}[k];
        CHECK(peaks[k] == doctest::Approx(expected).epsilon(1e-3));
    }
}

TEST_CASE("a single slit has too few principal maxima") {
    const auto ap = make_grating(1.0, 0.5, 1, 1.0);
    const auto p = classical_one_photon(ap, QGrid(-6.0, 6.0, 601));
    CHECK_THROWS_AS(peak_spacing(p), InsufficientPeaks);
}

TEST_CASE("delta one-photon pattern flattens as the q' range grows") {
    const auto ap = reference_grating();
    const auto quad = default_quad(ap);
    const QGrid rows = QGrid::symmetric(4.0, 0.05);
    double previous = 2.0;
    for (double half : {8.0, 16.0, 32.0}) {
        const auto p = one_photon_pattern(ap, CorrelationKernel::delta(), rows, QGrid::symmetric(half, 0.05), quad);
        const double v = visibility(p, -2.0, 2.0);
        CAPTURE(half);
        CHECK(v < previous);
        CHECK(non_negative(p));
        REQUIRE(p.provenance.truncation_residual.has_value());
        previous = v;
    }
    CHECK(previous < 0.05);

    const auto exact = one_photon_marginal(ap, CorrelationKernel::delta(), rows, quad);
    CHECK(visibility(exact, -2.0, 2.0) == 0.0);
    CHECK(exact.intensity[0] == doctest::Approx(20 * 0.5 / (2.0 * kPi)).epsilon(1e-14));
}

TEST_CASE("uniform marginal is the classical pattern times int A^2") {
    const auto ap = make_grating(1.0, 0.5, 20, 1.3);
    const QGrid rows = QGrid::symmetric(2.0, 0.05);
    const auto quad = default_quad(ap);
    const auto marginal = one_photon_marginal(ap, CorrelationKernel::uniform(), rows, quad);
    const auto classical = classical_one_photon(ap, rows);
    const double norm = 20 * 0.5 * 1.3 * 1.3;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(marginal.intensity[i] == doctest::Approx(classical.intensity[i] * norm).epsilon(1e-12));
    }
    // Truncated integration converges to the same values.
    const auto truncated = one_photon_pattern(ap, CorrelationKernel::uniform(), rows, QGrid::symmetric(64.0, 0.05), quad);
    const double peak = marginal.intensity[rows.size() / 2];
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(std::abs(truncated.intensity[i] - marginal.intensity[i]) <= 1e-2 * peak);
    }
    CHECK(*truncated.provenance.truncation_residual < 1e-2);
}

TEST_CASE("Gaussian marginal agrees with truncated integration") {
    const auto ap = make_grating(1.0, 0.5, 8, 1.0);
    const auto kernel = CorrelationKernel::gaussian(kMeasuredCorrelationWidth);
    const QGrid rows = QGrid::symmetric(2.0, 0.05);
    const auto quad = XGrid::covering(ap, 15 * 64 + 1);
    const auto marginal = one_photon_marginal(ap, kernel, rows, quad);
    const auto truncated = one_photon_pattern(ap, kernel, rows, QGrid::symmetric(32.0, 0.05), quad);
    const double peak = *std::max_element(marginal.intensity.begin(), marginal.intensity.end());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(std::abs(truncated.intensity[i] - marginal.intensity[i]) <= 1e-2 * peak);
    }
    CHECK(non_negative(marginal));
    CHECK(non_negative(truncated));
}

TEST_CASE("narrow q' range records a truncation diagnostic") {
    const auto ap = reference_grating();
    // Boundary off the Dirichlet zeros k / N.
    const auto p = one_photon_pattern(ap, CorrelationKernel::uniform(), QGrid::symmetric(1.0, 0.05),
                                      QGrid::symmetric(0.32, 0.04), default_quad(ap));
    const bool flagged = std::any_of(p.provenance.diagnostics.begin(), p.provenance.diagnostics.end(),
                                     [](const Diagnostic& d) { return d.code == "truncation"; });
    CHECK(flagged);
}

TEST_CASE("diagonal pattern needs a square amplitude") {
    const auto ap = reference_grating();
    const auto f = biphoton_amplitude(ap, CorrelationKernel::uniform(), QGrid(-1.0, 1.0, 11), QGrid(-2.0, 2.0, 21),
                                      default_quad(ap));
    CHECK_THROWS_AS(diagonal_pattern(f), GridMismatch);
}

TEST_CASE("visibility edge cases") {
    DiffractionPattern flat;
    DiffractionPattern dark;
    for (int i = 0; i <= 40; ++i) {
        flat.q.push_back(-1.0 + 0.05 * i);
        flat.intensity.push_back(3.0);
    }
    dark.q = flat.q;
    dark.intensity.assign(flat.q.size(), 0.0);
    CHECK(visibility(flat, -1.0, 1.0) == 0.0);
    CHECK(visibility(dark, -1.0, 1.0) == 0.0);
    CHECK_THROWS_AS(visibility(flat, -0.2, 0.2), WindowTooSmall);
    CHECK_THROWS_AS(visibility(flat, -1.0, 1.0, 5.0), WindowTooSmall);

    DiffractionPattern sparse{{-1.0, 0.0, 1.0}, {1.0, 0.0, 1.0}};
    CHECK_THROWS_AS(visibility(sparse, -1.0, 1.0), WindowTooSmall);

    const auto classical = classical_one_photon(reference_grating(), QGrid::symmetric(1.0, 0.01));
    CHECK(visibility(classical, -1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Gaussian visibility lies between the delta and uniform limits") {
    const auto ap = reference_grating();
    const QGrid rows = QGrid::symmetric(1.0, 0.05);
    const auto quad = default_quad(ap);
    const double v_delta = visibility(one_photon_marginal(ap, CorrelationKernel::delta(), rows, quad), -1.0, 1.0);
    const double v_uniform = visibility(one_photon_marginal(ap, CorrelationKernel::uniform(), rows, quad), -1.0, 1.0);
    const double v_gauss = visibility(
        one_photon_marginal(ap, CorrelationKernel::gaussian(kMeasuredCorrelationWidth), rows, quad), -1.0, 1.0);
    CHECK(v_gauss > v_delta + 0.05);
    CHECK(v_gauss < v_uniform - 0.05);
}
