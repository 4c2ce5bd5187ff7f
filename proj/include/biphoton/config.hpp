#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "biphoton/aperture.hpp"
#include "biphoton/correlation.hpp"
#include "biphoton/grid.hpp"
#include "biphoton/rates.hpp"

namespace biphoton {

enum class DetectionSet { OnePhoton, Diagonal, Both };

std::string_view to_string(DetectionSet detection) noexcept;
/// "one-photon", "two-photon-diagonal" (or "diagonal") and "both".
DetectionSet parse_detection_set(std::string_view text);

/// How the one-photon rate handles the q' integral.
enum class Marginal { Exact, Grid };

/// Flat simulation settings. Lengths are stored in units of the nominal
/// period; `unit_length` remembers its physical size in meters when the
/// period was entered with a unit.
struct RunConfig {
    double d = 1.0;
    double s = 0.5;
    int N = 20;
    double A0 = 1.0;
    double center_offset = 0.0;
    KernelKind kernel = KernelKind::Uniform;
    std::optional<double> w;
    double q_min = -4.0;
    double q_max = 4.0;
    std::size_t q_points = 801;
    /// q' half-range for Marginal::Grid; 0 picks max(|q|, 16 d / s).
    double qp_range = 0.0;
    Marginal marginal = Marginal::Exact;
    std::size_t x_points = 4096;
    DetectionSet detection = DetectionSet::Both;
    Normalization normalization = Normalization::Raw;
    std::string output = "pattern.csv";
    std::string joint_output;
    std::optional<double> unit_length;

    ApertureSpec aperture() const;
    CorrelationKernel correlation() const;
    /// q axis in units of 2 pi / d.
    QGrid q_grid() const;
    XGrid x_grid() const;
    /// q' grid of Marginal::Grid with the spacing of q_grid().
    QGrid integration_grid() const;
};

/// Keys accepted by `set`, in serialization order.
const std::vector<std::string>& config_keys();

/// Assigns one key. Lengths (d, s, center_offset, w) accept a plain number
/// in period units, a multiple of d ("0.56d"), or a physical length ("250um",
/// "125 µm", "0.25mm", "500nm", "2.5e-4m"). Physical lengths other than d
/// need d in physical units. Throws ValidationError naming the key.
void set(RunConfig& config, std::string_view key, std::string_view value);

/// Parses key=value lines; '#' starts a comment. Keys are applied in file
/// order except d, which goes first so other lengths can refer to it.
/// Throws ParseError with the line number for malformed lines, and
/// ValidationError for bad values.
RunConfig parse_config(std::string_view text);

/// Throws ValidationError unless every part composes.
void validate(const RunConfig& config);

/// Canonical text form; parse_config(serialize(c)) reproduces c.
std::string serialize(const RunConfig& config);

/// Shortest decimal string that reads back to the same double.
std::string format_number(double value);

} // namespace biphoton
