#include "biphoton/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "biphoton/aperture.hpp"
#include "biphoton/quadrature.hpp"

namespace biphoton {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_geometric(FitParam p) noexcept {
    return p == FitParam::Period || p == FitParam::SlitWidth || p == FitParam::QOffset;
}

bool model_is_flat(KernelKind regime, Detection detection) noexcept {
    return regime == KernelKind::Delta && detection == Detection::OnePhoton;
}

// Nelder-Mead on an unconstrained vector; invalid points evaluate to +inf.
struct SearchOutcome {
    std::vector<double> point;
    double value = kInf;
    int iterations = 0;
    bool tolerance_met = false;
    std::vector<double> history;
};

using Objective = std::function<double(const std::vector<double>&)>;

SearchOutcome nelder_mead(const Objective& f, const std::vector<double>& start, const std::vector<double>& steps,
                          int max_iterations, double tolerance, double floor) {
    const std::size_t n = start.size();
    std::vector<std::vector<double>> simplex(n + 1, start);
    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        simplex[i + 1][i] += steps[i];
    }
    for (std::size_t i = 0; i <= n; ++i) {
        values[i] = f(simplex[i]);
    }

    std::vector<std::size_t> order(n + 1);
    auto affine = [n](const std::vector<double>& a, const std::vector<double>& b, double t) {
        // a + t (b - a)
        std::vector<double> out(n);
        for (std::size_t k = 0; k < n; ++k) {
            out[k] = a[k] + t * (b[k] - a[k]);
        }
        return out;
    };

    SearchOutcome out;
    for (;;) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[n - 1];
        out.history.push_back(values[best]);

        if (values[worst] - values[best] <= tolerance * std::abs(values[best]) + floor) {
            out.tolerance_met = true;
            break;
        }
        if (out.iterations >= max_iterations) {
            break;
        }
        ++out.iterations;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) {
                continue;
            }
            for (std::size_t k = 0; k < n; ++k) {
                centroid[k] += simplex[i][k] / static_cast<double>(n);
            }
        }

        const auto reflected = affine(centroid, simplex[worst], -1.0);
        const double f_reflected = f(reflected);
        if (f_reflected < values[best]) {
            const auto expanded = affine(centroid, simplex[worst], -2.0);
            const double f_expanded = f(expanded);
            if (f_expanded < f_reflected) {
                simplex[worst] = expanded;
                values[worst] = f_expanded;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_reflected;
            }
            continue;
        }
        if (f_reflected < values[second]) {
            simplex[worst] = reflected;
            values[worst] = f_reflected;
            continue;
        }
        const bool outside = f_reflected < values[worst];
        const auto contracted = outside ? affine(centroid, reflected, 0.5) : affine(centroid, simplex[worst], 0.5);
        const double f_contracted = f(contracted);
        if (outside ? f_contracted <= f_reflected : f_contracted < values[worst]) {
            simplex[worst] = contracted;
            values[worst] = f_contracted;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) {
                continue;
            }
            simplex[i] = affine(simplex[best], simplex[i], 0.5);
            values[i] = f(simplex[i]);
        }
    }

    const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
    out.point = simplex[best];
    out.value = values[best];
    return out;
}

class Problem {
public:
    Problem(std::vector<double> q, std::vector<double> y, KernelKind regime, Detection detection,
            std::set<FitParam> free, FitOptions options)
        : q_(std::move(q)), y_(std::move(y)), regime_(regime), detection_(detection), free_(std::move(free)),
          options_(std::move(options)) {
        for (FitParam p : {FitParam::Period, FitParam::SlitWidth, FitParam::Width, FitParam::QOffset}) {
            if (free_.count(p) != 0) {
                nonlinear_.push_back(p);
            }
        }
        y_norm2_ = 0.0;
        for (double v : y_) {
            y_norm2_ += v * v;
        }
    }

    const std::vector<FitParam>& nonlinear() const noexcept { return nonlinear_; }
    double data_norm2() const noexcept { return y_norm2_; }
    const std::vector<double>& q() const noexcept { return q_; }
    const std::vector<double>& y() const noexcept { return y_; }

    std::vector<double> encode(const FitParams& p) const {
        std::vector<double> theta;
        for (FitParam param : nonlinear_) {
            switch (param) {
            case FitParam::Period:
                theta.push_back(std::log(p.d));
                break;
            case FitParam::SlitWidth:
                theta.push_back(std::log(std::max(p.d / p.s - 1.0, 1e-9)));
                break;
            case FitParam::Width:
                theta.push_back(std::log(*p.w));
                break;
            case FitParam::QOffset:
                theta.push_back(p.q_offset);
                break;
            default:
                break;
            }
        }
        return theta;
    }

    std::vector<double> steps() const {
        std::vector<double> out;
        for (FitParam param : nonlinear_) {
            switch (param) {
            case FitParam::Period:
                out.push_back(1e-2);
                break;
            case FitParam::SlitWidth:
                out.push_back(5e-2);
                break;
            case FitParam::Width:
                out.push_back(5e-2);
                break;
            default:
                out.push_back(2e-2);
                break;
            }
        }
        return out;
    }

    /// Nonlinear parameters from theta, on top of `base`. False if invalid.
    bool decode(const std::vector<double>& theta, const FitParams& base, FitParams& out) const {
        out = base;
        std::optional<double> ratio_param;
        for (std::size_t i = 0; i < nonlinear_.size(); ++i) {
            switch (nonlinear_[i]) {
            case FitParam::Period:
                out.d = std::exp(theta[i]);
                break;
            case FitParam::SlitWidth:
                ratio_param = theta[i];
                break;
            case FitParam::Width:
                out.w = std::exp(theta[i]);
                break;
            case FitParam::QOffset:
                out.q_offset = theta[i];
                break;
            default:
                break;
            }
        }
        if (ratio_param) {
            out.s = out.d / (1.0 + std::exp(*ratio_param));
        }
        return std::isfinite(out.d) && std::isfinite(out.s) && out.s > 0.0 && out.s <= out.d &&
               (!out.w || (std::isfinite(*out.w) && *out.w > 0.0)) && std::isfinite(out.q_offset);
    }

    /// Sets scale/background of `p` in closed form; returns the residual sum
    /// of squares.
    double solve_linear(FitParams& p) const {
        const auto model = pattern_model(regime_, detection_, p, options_, q_);
        const bool free_scale = free_.count(FitParam::Scale) != 0;
        const bool free_background = free_.count(FitParam::Background) != 0;
        const auto n = static_cast<double>(q_.size());

        double smm = 0.0, sm = 0.0, sy = 0.0, smy = 0.0;
        for (std::size_t i = 0; i < q_.size(); ++i) {
            smm += model[i] * model[i];
            sm += model[i];
            sy += y_[i];
            smy += model[i] * y_[i];
        }
        constexpr double kTinyScale = 1e-300;
        auto scale_given_background = [&](double bg) { return std::max((smy - bg * sm) / smm, kTinyScale); };

        if (free_scale && free_background) {
            const double det = n * smm - sm * sm;
            if (!(det > 1e-12 * n * smm)) {
                p.scale = scale_given_background(p.background);
            } else {
                p.scale = (n * smy - sm * sy) / det;
                p.background = (sy - p.scale * sm) / n;
                if (p.background < 0.0) {
                    p.background = 0.0;
                    p.scale = scale_given_background(0.0);
                }
                p.scale = std::max(p.scale, kTinyScale);
            }
        } else if (free_scale) {
            p.scale = scale_given_background(p.background);
        } else if (free_background) {
            p.background = std::max(0.0, (sy - p.scale * sm) / n);
        }

        double ssr = 0.0;
        for (std::size_t i = 0; i < q_.size(); ++i) {
            const double r = y_[i] - (p.scale * model[i] + p.background);
            ssr += r * r;
        }
        return ssr;
    }

    std::vector<double> residuals(const FitParams& p) const {
        const auto model = pattern_model(regime_, detection_, p, options_, q_);
        std::vector<double> r(q_.size());
        for (std::size_t i = 0; i < q_.size(); ++i) {
            r[i] = y_[i] - (p.scale * model[i] + p.background);
        }
        return r;
    }

private:
    std::vector<double> q_;
    std::vector<double> y_;
    KernelKind regime_;
    Detection detection_;
    std::set<FitParam> free_;
    FitOptions options_;
    std::vector<FitParam> nonlinear_;
    double y_norm2_ = 0.0;
};

double& field(FitParams& p, FitParam param) {
    switch (param) {
    case FitParam::Scale:
        return p.scale;
    case FitParam::Background:
        return p.background;
    case FitParam::Period:
        return p.d;
    case FitParam::SlitWidth:
        return p.s;
    case FitParam::Width:
        return *p.w;
    case FitParam::QOffset:
        return p.q_offset;
    }
    return p.scale;
}

// Finite-difference Jacobian of the residuals, standard errors from the
// local quadratic model, and the projected normalized gradient.
void characterize(const Problem& problem, const std::set<FitParam>& free, FitResult& result) {
    const FitParams& p = result.params;
    const auto r0 = problem.residuals(p);
    const auto n = static_cast<Eigen::Index>(r0.size());
    const std::vector<FitParam> params(free.begin(), free.end());
    const auto k = static_cast<Eigen::Index>(params.size());

    Eigen::MatrixXd jac(n, k);
    for (Eigen::Index j = 0; j < k; ++j) {
        FitParams plus = p;
        FitParams minus = p;
        const double base = field(plus, params[j]);
        const double h = 1e-6 * std::max(std::abs(base), 1e-2);
        field(plus, params[j]) = base + h;
        field(minus, params[j]) = base - h;
        const auto rp = problem.residuals(plus);
        const auto rm = problem.residuals(minus);
        for (Eigen::Index i = 0; i < n; ++i) {
            jac(i, j) = (rp[i] - rm[i]) / (2.0 * h);
        }
    }

    const Eigen::Map<const Eigen::VectorXd> r(r0.data(), n);
    const double y_norm = std::sqrt(problem.data_norm2());
    result.gradient_norm = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) {
        const double jtr = jac.col(j).dot(r);
        // d(sum r^2)/dp = 2 J^T r; a background pinned at zero with an
        // upward-pointing gradient sits on its bound.
        if (params[j] == FitParam::Background && p.background == 0.0 && jtr >= 0.0) {
            continue;
        }
        const double col = jac.col(j).norm();
        if (col > 0.0 && y_norm > 0.0) {
            result.gradient_norm = std::max(result.gradient_norm, std::abs(jtr) / (col * y_norm));
        }
    }

    const double dof = static_cast<double>(n - k);
    const double sigma2 = dof > 0 ? r.squaredNorm() / dof : std::numeric_limits<double>::quiet_NaN();
    const Eigen::MatrixXd cov = (jac.transpose() * jac).completeOrthogonalDecomposition().pseudoInverse() * sigma2;
    for (Eigen::Index j = 0; j < k; ++j) {
        result.standard_errors[params[j]] = std::sqrt(std::max(cov(j, j), 0.0));
    }
}

} // namespace

std::string_view to_string(FitParam param) noexcept {
    switch (param) {
    case FitParam::Scale:
        return "scale";
    case FitParam::Background:
        return "background";
    case FitParam::Period:
        return "d";
    case FitParam::SlitWidth:
        return "s";
    case FitParam::Width:
        return "w";
    case FitParam::QOffset:
        return "q_offset";
    }
    return "unknown";
}

FitParam parse_fit_param(std::string_view text) {
    for (FitParam p : {FitParam::Scale, FitParam::Background, FitParam::Period, FitParam::SlitWidth, FitParam::Width,
                       FitParam::QOffset}) {
        if (text == to_string(p)) {
            return p;
        }
    }
    throw ValidationError("free", "unknown fit parameter '" + std::string(text) +
                                      "' (scale, background, d, s, w, q_offset)");
}

void validate(const FitParams& params) {
    if (!std::isfinite(params.scale) || params.scale <= 0.0) {
        throw ValidationError("scale", "must be > 0");
    }
    if (!std::isfinite(params.background) || params.background < 0.0) {
        throw ValidationError("background", "must be >= 0");
    }
    if (!std::isfinite(params.d) || params.d <= 0.0) {
        throw ValidationError("d", "must be > 0");
    }
    if (!std::isfinite(params.s) || params.s <= 0.0 || params.s > params.d) {
        throw ValidationError("s", "must satisfy 0 < s <= d");
    }
    if (params.w && (!std::isfinite(*params.w) || *params.w <= 0.0)) {
        throw ValidationError("w", "must be > 0");
    }
    if (!std::isfinite(params.q_offset)) {
        throw ValidationError("q_offset", "must be finite");
    }
}

std::vector<double> pattern_model(KernelKind regime, Detection detection, const FitParams& params,
                                  const FitOptions& options, std::span<const double> q) {
    const auto ap = make_grating(params.d, params.s, options.slit_count, options.amplitude);
    const double unit = 2.0 * std::numbers::pi;
    std::vector<double> out(q.size());

    switch (regime) {
    case KernelKind::Delta:
        if (detection == Detection::OnePhoton) {
            std::fill(out.begin(), out.end(), 1.0);
        } else {
            const double peak = std::norm(analytic_ft_squared(ap, 0.0));
            for (std::size_t i = 0; i < q.size(); ++i) {
                out[i] = std::norm(analytic_ft_squared(ap, 2.0 * unit * (q[i] + params.q_offset))) / peak;
            }
        }
        break;
    case KernelKind::Uniform: {
        const double peak = std::norm(analytic_ft(ap, 0.0));
        for (std::size_t i = 0; i < q.size(); ++i) {
            const double v = std::norm(analytic_ft(ap, unit * (q[i] + params.q_offset))) / peak;
            out[i] = detection == Detection::OnePhoton ? v : v * v;
        }
        break;
    }
    case KernelKind::Gaussian: {
        if (!params.w) {
            throw ValidationError("w", "Gaussian regime needs a correlation width");
        }
        const auto kernel = CorrelationKernel::gaussian(*params.w);
        const auto nodes = slit_nodes(ap, options.nodes_per_slit);
        std::vector<double> qs(q.size() + 1);
        for (std::size_t i = 0; i < q.size(); ++i) {
            qs[i] = unit * (q[i] + params.q_offset);
        }
        qs.back() = 0.0;
        if (detection == Detection::OnePhoton) {
            const auto values = dense_marginal(nodes, kernel, qs);
            for (std::size_t i = 0; i < q.size(); ++i) {
                out[i] = values[i] / values.back();
            }
        } else {
            const auto values = dense_diagonal(nodes, kernel, qs);
            const double peak = std::norm(values.back());
            for (std::size_t i = 0; i < q.size(); ++i) {
                out[i] = std::norm(values[i]) / peak;
            }
        }
        break;
    }
    }
    return out;
}

DiffractionPattern synthesize(KernelKind regime, Detection detection, const FitParams& params,
                              const FitOptions& options, std::span<const double> q, double noise,
                              std::uint64_t seed) {
    validate(params);
    if (!std::isfinite(noise) || noise < 0.0) {
        throw ValidationError("noise", "must be >= 0");
    }
    DiffractionPattern out;
    out.q.assign(q.begin(), q.end());
    const auto model = pattern_model(regime, detection, params, options, q);
    out.intensity.resize(q.size());
    double peak = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        out.intensity[i] = params.scale * model[i] + params.background;
        peak = std::max(peak, out.intensity[i]);
    }
    if (noise > 0.0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, noise * peak);
        for (double& v : out.intensity) {
            v = std::max(0.0, v + gauss(rng));
        }
    }
    out.provenance.kernel = std::string(to_string(regime));
    if (params.w) {
        out.provenance.kernel += "(w=" + std::to_string(*params.w) + ")";
    }
    out.provenance.detection = std::string(to_string(detection));
    return out;
}

FitResult fit_pattern(const DiffractionPattern& data, KernelKind regime, Detection detection,
                      const std::set<FitParam>& free, const FitParams& init, const FitOptions& options) {
    validate(data);
    validate(init);
    if (free.empty()) {
        throw ValidationError("free", "no free parameters");
    }
    if (data.size() < 2 * free.size()) {
        throw ValidationError("data", "need at least twice as many points as free parameters");
    }
    if (options.slit_count < 1) {
        throw ValidationError("slit_count", "must be >= 1");
    }
    if (regime == KernelKind::Gaussian && !init.w) {
        throw ValidationError("w", "Gaussian regime needs an initial correlation width");
    }
    if (regime != KernelKind::Gaussian && free.count(FitParam::Width) != 0) {
        throw ValidationError("free", "w is only a parameter of the Gaussian regime");
    }
    if (model_is_flat(regime, detection)) {
        for (FitParam p : free) {
            if (is_geometric(p)) {
                throw ValidationError("free", "the delta-regime one-photon model is flat and does not depend on " +
                                                  std::string(to_string(p)));
            }
        }
    }

    // Sort so the result does not depend on the input order.
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (data.q[a] != data.q[b]) {
            return data.q[a] < data.q[b];
        }
        return data.intensity[a] < data.intensity[b];
    });
    std::vector<double> q(data.size());
    std::vector<double> y(data.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        q[i] = data.q[order[i]];
        y[i] = data.intensity[order[i]];
    }

    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    const bool constant = *hi - *lo <= 1e-12 * std::max(std::abs(*hi), std::abs(*lo));
    if (constant && !model_is_flat(regime, detection) && free.count(FitParam::Period) != 0 &&
        free.count(FitParam::SlitWidth) != 0) {
        throw DegenerateData("data is constant but the " + std::string(to_string(regime)) + " " +
                             std::string(to_string(detection)) + " model is modulated; d and s are not identifiable");
    }

    const Problem problem(q, y, regime, detection, free, options);

    std::vector<FitParams> starts{init};
    if (free.count(FitParam::SlitWidth) != 0) {
        for (double ratio : options.ratio_starts) {
            if (!(ratio >= 1.0)) {
                throw ValidationError("ratio_starts", "d/s starts must be >= 1");
            }
            if (std::abs(ratio - init.d / init.s) < 1e-12) {
                continue;
            }
            FitParams start = init;
            start.s = init.d / ratio;
            starts.push_back(start);
        }
    }

    const double floor = 1e-26 * problem.data_norm2();
    std::optional<FitResult> best;
    for (const FitParams& start : starts) {
        FitResult result;
        result.starts = starts.size();
        FitParams base = start;

        if (problem.nonlinear().empty()) {
            const double ssr = problem.solve_linear(base);
            result.params = base;
            result.objective_history = {ssr};
            result.n_iterations = 0;
            result.converged = true;
        } else {
            const Objective objective = [&](const std::vector<double>& theta) {
                FitParams p;
                if (!problem.decode(theta, base, p)) {
                    return kInf;
                }
                const double v = problem.solve_linear(p);
                return std::isfinite(v) ? v : kInf;
            };

            // Restart from the best point until a fresh simplex no longer
            // improves the objective.
            std::vector<double> theta = problem.encode(start);
            int budget = options.max_iterations;
            bool tolerance_met = false;
            double previous = kInf;
            for (int restart = 0; restart < 4 && budget > 0; ++restart) {
                auto outcome =
                    nelder_mead(objective, theta, problem.steps(), budget, options.tolerance, floor);
                budget -= outcome.iterations;
                result.n_iterations += outcome.iterations;
                result.objective_history.insert(result.objective_history.end(), outcome.history.begin(),
                                                outcome.history.end());
                theta = outcome.point;
                tolerance_met = outcome.tolerance_met;
                const bool stalled = previous - outcome.value <= options.tolerance * std::abs(outcome.value) + floor;
                previous = outcome.value;
                if (!tolerance_met || stalled) {
                    break;
                }
            }
            FitParams p;
            problem.decode(theta, base, p);
            problem.solve_linear(p);
            result.params = p;
            result.converged = tolerance_met;
        }

        const auto r = problem.residuals(result.params);
        double ssr = 0.0;
        for (double v : r) {
            ssr += v * v;
        }
        result.residual_rms = std::sqrt(ssr / static_cast<double>(r.size()));
        characterize(problem, free, result);
        result.converged = result.converged && result.gradient_norm <= options.gradient_tolerance;

        const bool better = !best || (result.converged && !best->converged) ||
                            (result.converged == best->converged && result.residual_rms < best->residual_rms);
        if (better) {
            best = std::move(result);
        }
    }
    return *best;
}

} // namespace biphoton
