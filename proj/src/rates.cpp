#include "biphoton/rates.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include "biphoton/quadrature.hpp"

namespace biphoton {

namespace {

constexpr double kBoundaryFraction = 1e-3;

std::string lowercase(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

Provenance make_provenance(const ApertureSpec* ap, std::string kernel, Detection detection) {
    Provenance p;
    p.kernel = std::move(kernel);
    p.detection = std::string(to_string(detection));
    if (ap != nullptr) {
        p.aperture = describe(*ap);
    }
    return p;
}

} // namespace

std::string_view to_string(Detection detection) noexcept {
    switch (detection) {
    case Detection::OnePhoton:
        return "one-photon";
    case Detection::TwoPhotonDiagonal:
        return "two-photon-diagonal";
    }
    return "unknown";
}

Detection parse_detection(std::string_view text) {
    const std::string lower = lowercase(text);
    if (lower == "one-photon" || lower == "one" || lower == "one_photon") {
        return Detection::OnePhoton;
    }
    if (lower == "two-photon-diagonal" || lower == "diagonal" || lower == "two-photon" || lower == "two_photon_diagonal") {
        return Detection::TwoPhotonDiagonal;
    }
    throw ValidationError("detection", "unknown detection '" + std::string(text) + "' (one-photon, two-photon-diagonal)");
}

std::string_view to_string(Normalization normalization) noexcept {
    return normalization == Normalization::Raw ? "raw" : "peak";
}

Normalization parse_normalization(std::string_view text) {
    const std::string lower = lowercase(text);
    if (lower == "raw") {
        return Normalization::Raw;
    }
    if (lower == "peak" || lower == "peak-normalized") {
        return Normalization::PeakNormalized;
    }
    throw ValidationError("normalization", "unknown normalization '" + std::string(text) + "' (raw, peak)");
}

std::string describe(const ApertureSpec& ap) {
    std::ostringstream out;
    out.precision(17);
    out << "d=" << ap.period() << " s=" << ap.slit_width() << " N=" << ap.slit_count() << " A0=" << ap.amplitude();
    if (ap.center_offset() != 0.0) {
        out << " offset=" << ap.center_offset();
    }
    return out.str();
}

void validate(const DiffractionPattern& pattern) {
    if (pattern.q.size() != pattern.intensity.size()) {
        throw ValidationError("pattern", "q and intensity lengths differ");
    }
    if (pattern.q.size() < 2) {
        throw ValidationError("pattern", "need at least 2 samples");
    }
    double peak = 0.0;
    for (double v : pattern.intensity) {
        if (!std::isfinite(v) || v < 0.0) {
            throw ValidationError("pattern", "intensities must be finite and >= 0");
        }
        peak = std::max(peak, v);
    }
    if (pattern.normalization == Normalization::PeakNormalized && std::abs(peak - 1.0) > 1e-12) {
        throw ValidationError("pattern", "peak-normalized pattern must have maximum 1");
    }
}

DiffractionPattern peak_normalized(DiffractionPattern pattern) {
    const double peak = pattern.intensity.empty()
                            ? 0.0
                            : *std::max_element(pattern.intensity.begin(), pattern.intensity.end());
    if (peak > 0.0) {
        for (double& v : pattern.intensity) {
            v /= peak;
        }
    }
    pattern.normalization = Normalization::PeakNormalized;
    return pattern;
}

JointRate two_photon_rate(const BiphotonAmplitude& amplitude) {
    return JointRate{amplitude.rows, amplitude.cols, amplitude.values.cwiseAbs2()};
}

DiffractionPattern one_photon_rate(const JointRate& joint) {
    DiffractionPattern out;
    out.q = joint.rows.normalized_values();
    out.provenance.detection = std::string(to_string(Detection::OnePhoton));

    const double dq = joint.cols.wavenumber_spacing();
    const Eigen::VectorXd sums = joint.values.rowwise().sum() * dq;
    out.intensity.assign(sums.data(), sums.data() + sums.size());

    const double largest = sums.maxCoeff();
    const Eigen::Index last = joint.values.cols() - 1;
    const double boundary = (joint.values.col(0) + joint.values.col(last)).maxCoeff() * dq;
    if (largest > 0.0 && boundary >= kBoundaryFraction * largest) {
        std::ostringstream msg;
        msg << "q' boundary contributes " << boundary / largest << " of the largest row sum (limit "
            << kBoundaryFraction << "); widen the integration range";
        out.provenance.diagnostics.push_back({"truncation", msg.str()});
    }
    return out;
}

DiffractionPattern diagonal_pattern(const BiphotonAmplitude& amplitude) {
    if (!amplitude.is_square()) {
        throw GridMismatch("diagonal pattern needs a square amplitude");
    }
    DiffractionPattern out;
    out.q = amplitude.rows.normalized_values();
    out.intensity.resize(out.q.size());
    for (std::size_t i = 0; i < out.q.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        out.intensity[i] = std::norm(amplitude.values(k, k));
    }
    out.provenance.kernel = std::string(to_string(amplitude.regime));
    out.provenance.detection = std::string(to_string(Detection::TwoPhotonDiagonal));
    out.provenance.diagnostics = amplitude.diagnostics;
    return out;
}

DiffractionPattern classical_one_photon(const ApertureSpec& ap, const QGrid& grid) {
    DiffractionPattern out;
    out.q = grid.normalized_values();
    out.intensity.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out.intensity[i] = std::norm(analytic_ft(ap, grid.wavenumber(i)));
    }
    out.provenance = make_provenance(&ap, std::string(to_string(KernelKind::Uniform)), Detection::OnePhoton);
    return out;
}

DiffractionPattern one_photon_pattern(const ApertureSpec& ap, const CorrelationKernel& kernel, const QGrid& grid,
                                      const QGrid& integration, const XGrid& quad) {
    const auto amplitude = biphoton_amplitude(ap, kernel, grid, integration, quad);
    DiffractionPattern out = one_photon_rate(two_photon_rate(amplitude));

    const QGrid wide = integration.doubled();
    const DiffractionPattern reference =
        one_photon_rate(two_photon_rate(biphoton_amplitude(ap, kernel, grid, wide, quad)));

    double diff = 0.0;
    double peak = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        diff = std::max(diff, std::abs(out.intensity[i] - reference.intensity[i]));
        peak = std::max(peak, reference.intensity[i]);
    }

    Diagnostics diagnostics = amplitude.diagnostics;
    diagnostics.insert(diagnostics.end(), out.provenance.diagnostics.begin(), out.provenance.diagnostics.end());
    out.provenance = make_provenance(&ap, kernel.describe(), Detection::OnePhoton);
    out.provenance.truncation_residual = peak > 0.0 ? diff / peak : 0.0;
    out.provenance.diagnostics = std::move(diagnostics);
    return out;
}

DiffractionPattern one_photon_marginal(const ApertureSpec& ap, const CorrelationKernel& kernel, const QGrid& grid,
                                       const XGrid& quad) {
    DiffractionPattern out;
    out.q = grid.normalized_values();
    out.provenance = make_provenance(&ap, kernel.describe(), Detection::OnePhoton);
    check_quadrature(ap, quad, out.provenance.diagnostics);

    const double a2 = ap.amplitude() * ap.amplitude();
    const double open_length = ap.slit_count() * ap.slit_width();
    switch (kernel.kind()) {
    case KernelKind::Delta:
        out.intensity.assign(grid.size(), a2 * a2 * open_length / (2.0 * std::numbers::pi));
        break;
    case KernelKind::Uniform:
        out.intensity.resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            out.intensity[i] = std::norm(analytic_ft(ap, grid.wavenumber(i))) * a2 * open_length;
        }
        break;
    case KernelKind::Gaussian: {
        const auto q = grid.wavenumbers();
        out.intensity = dense_marginal(midpoint_nodes(ap, quad), kernel, q);
        break;
    }
    }
    return out;
}

double visibility(const DiffractionPattern& pattern, double q_lo, double q_hi, double min_period) {
    if (!(q_hi - q_lo >= min_period)) {
        std::ostringstream msg;
        msg << "window [" << q_lo << ", " << q_hi << "] is narrower than one modulation period (" << min_period << ")";
        throw WindowTooSmall(msg.str());
    }
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        if (pattern.q[i] < q_lo || pattern.q[i] > q_hi) {
            continue;
        }
        const double v = pattern.intensity[i];
        if (count == 0) {
            lo = hi = v;
        } else {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        ++count;
    }
    if (count < 8) {
        throw WindowTooSmall("window holds " + std::to_string(count) + " samples; need at least 8");
    }
    if (hi + lo == 0.0) {
        return 0.0;
    }
    return (hi - lo) / (hi + lo);
}

std::vector<double> principal_peaks(const DiffractionPattern& pattern, double threshold) {
    std::vector<double> peaks;
    if (pattern.size() < 3) {
        return peaks;
    }
    const auto& y = pattern.intensity;
    const auto& x = pattern.q;
    const double cut = threshold * *std::max_element(y.begin(), y.end());
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        if (!(y[i] > y[i - 1] && y[i] >= y[i + 1]) || y[i] < cut) {
            continue;
        }
        // Vertex of the parabola through the three samples.
        const double x0 = x[i - 1], x1 = x[i], x2 = x[i + 1];
        const double y0 = y[i - 1], y1 = y[i], y2 = y[i + 1];
        const double num = (x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0);
        const double den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
        double vertex = x1;
        if (den != 0.0) {
            vertex = x1 - 0.5 * num / den;
            vertex = std::clamp(vertex, x0, x2);
        }
        peaks.push_back(vertex);
    }
    return peaks;
}

double peak_spacing(const DiffractionPattern& pattern, double threshold) {
    const auto peaks = principal_peaks(pattern, threshold);
    if (peaks.size() < 2) {
        throw InsufficientPeaks("found " + std::to_string(peaks.size()) + " principal maxima above " +
                                std::to_string(threshold) + " of the peak; need at least 2");
    }
    return (peaks.back() - peaks.front()) / static_cast<double>(peaks.size() - 1);
}

CombSummary classify_comb(const DiffractionPattern& pattern, double threshold) {
    constexpr double kTolerance = 0.1;
    CombSummary out;
    out.peaks = principal_peaks(pattern, threshold);
    for (double q : out.peaks) {
        if (std::abs(q) < kTolerance) {
            continue;
        }
        const double frac = std::abs(q - std::round(q));
        if (frac <= kTolerance) {
            ++out.integer_orders;
        } else if (std::abs(frac - 0.5) <= kTolerance) {
            ++out.half_orders;
        } else {
            ++out.other;
        }
    }
    if (out.integer_orders + out.half_orders + out.other == 0) {
        out.label = "none";
    } else if (out.other > out.integer_orders + out.half_orders) {
        out.label = "irregular";
    } else if (out.half_orders == 0) {
        out.label = "integer-orders";
    } else if (out.integer_orders == 0) {
        out.label = "half-orders";
    } else {
        out.label = "mixed";
    }
    return out;
}

} // namespace biphoton
