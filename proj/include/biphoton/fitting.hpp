#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include "biphoton/correlation.hpp"
#include "biphoton/rates.hpp"

namespace biphoton {

enum class FitParam { Scale, Background, Period, SlitWidth, Width, QOffset };

std::string_view to_string(FitParam param) noexcept;
/// Accepts "scale", "background", "d", "s", "w", "q_offset".
FitParam parse_fit_param(std::string_view text);

/// Forward-model parameters. Lengths are in units of the nominal grating
/// period (the one the data's q axis is normalized to); q_offset is in the
/// same normalized q units.
struct FitParams {
    double scale = 1.0;
    double background = 0.0;
    double d = 1.0;
    double s = 0.5;
    std::optional<double> w;
    double q_offset = 0.0;
};

/// Throws ValidationError unless 0 < s <= d, scale > 0, background >= 0 and
/// w > 0 when present.
void validate(const FitParams& params);

struct FitOptions {
    int slit_count = 20;
    double amplitude = 1.0;
    /// d/s values used as starting points when s is free.
    std::vector<double> ratio_starts{2.0, 2.5, 3.0, 3.5, 4.0};
    int max_iterations = 2000;
    /// Relative spread of the simplex objective values that ends a search.
    double tolerance = 1e-10;
    /// Normalized gradient bound a converged result must satisfy.
    double gradient_tolerance = 1e-5;
    /// Gauss-Legendre nodes per slit for the Gaussian-regime model.
    std::size_t nodes_per_slit = 16;
};

struct FitResult {
    FitParams params;
    double residual_rms = 0.0;
    std::map<FitParam, double> standard_errors;
    int n_iterations = 0;
    bool converged = false;
    /// max_j |J_j^T r| / (|J_j| |y|) at the solution.
    double gradient_norm = 0.0;
    /// Best objective after each iteration of the winning start.
    std::vector<double> objective_history;
    std::size_t starts = 0;
};

/// Shape of the detected pattern at normalized q (before scale/background),
/// divided by its value at q = 0 so that scale is in units of the peak.
std::vector<double> pattern_model(KernelKind regime, Detection detection, const FitParams& params,
                                  const FitOptions& options, std::span<const double> q);

/// scale * model(q + q_offset) + background, plus Gaussian noise with
/// standard deviation noise * max(clean), clipped at zero.
DiffractionPattern synthesize(KernelKind regime, Detection detection, const FitParams& params,
                              const FitOptions& options, std::span<const double> q, double noise = 0.0,
                              std::uint64_t seed = 0);

/// Least-squares fit of `data` to the forward model. Scale and background
/// are solved in closed form at each step; the remaining free parameters are
/// searched by Nelder-Mead, restarted from each d/s start when s is free.
///
/// Throws ValidationError for bad inputs and DegenerateData when constant
/// data meets a modulated model with d and s both free.
FitResult fit_pattern(const DiffractionPattern& data, KernelKind regime, Detection detection,
                      const std::set<FitParam>& free, const FitParams& init, const FitOptions& options = {});

} // namespace biphoton
