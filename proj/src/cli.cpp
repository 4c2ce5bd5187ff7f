#include "biphoton/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "biphoton/config.hpp"
#include "biphoton/error.hpp"
#include "biphoton/fitting.hpp"
#include "biphoton/pattern_io.hpp"
#include "biphoton/rates.hpp"

namespace biphoton {

namespace {

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const IoError*>(&e) != nullptr || dynamic_cast<const ParseError*>(&e) != nullptr) {
        return kExitIo;
    }
    if (dynamic_cast<const ValidationError*>(&e) != nullptr || dynamic_cast<const GridMismatch*>(&e) != nullptr) {
        return kExitConfig;
    }
    return kExitCompute;
}

// Config file plus one --key flag per config key; flags win.
struct ConfigOptions {
    std::string path;
    std::map<std::string, std::string> values;
    std::vector<std::pair<std::string, CLI::Option*>> options;

    void attach(CLI::App* app) {
        app->add_option("-c,--config", path, "key=value config file");
        for (const auto& key : config_keys()) {
            values[key];
        }
        for (const auto& key : config_keys()) {
            options.emplace_back(key, app->add_option("--" + key, values[key], "override config key " + key));
        }
    }

    RunConfig load() const {
        RunConfig config = parse_config(path.empty() ? std::string() : read_file(path));
        for (const auto& [key, option] : options) {
            if (option->count() > 0) {
                set(config, key, values.at(key));
            }
        }
        validate(config);
        return config;
    }
};

struct Simulation {
    std::optional<DiffractionPattern> one_photon;
    std::optional<DiffractionPattern> diagonal;
    std::optional<JointRate> joint;
};

Simulation simulate(const RunConfig& config) {
    const auto ap = config.aperture();
    const auto kernel = config.correlation();
    const auto grid = config.q_grid();
    const auto quad = config.x_grid();

    Simulation out;
    std::optional<BiphotonAmplitude> square;
    const bool want_diagonal = config.detection != DetectionSet::OnePhoton;
    if (want_diagonal || !config.joint_output.empty()) {
        square = biphoton_amplitude(ap, kernel, grid, quad);
    }
    if (config.detection != DetectionSet::Diagonal) {
        out.one_photon = config.marginal == Marginal::Exact
                             ? one_photon_marginal(ap, kernel, grid, quad)
                             : one_photon_pattern(ap, kernel, grid, config.integration_grid(), quad);
    }
    if (want_diagonal) {
        out.diagonal = diagonal_pattern(*square);
        out.diagonal->provenance.kernel = kernel.describe();
        out.diagonal->provenance.aperture = describe(ap);
    }
    if (!config.joint_output.empty()) {
        out.joint = two_photon_rate(*square);
    }
    for (auto* p : {&out.one_photon, &out.diagonal}) {
        if (*p && config.normalization == Normalization::PeakNormalized) {
            **p = peak_normalized(std::move(**p));
        }
    }
    return out;
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
    const std::filesystem::path p(path);
    return (p.parent_path() / (p.stem().string() + suffix + p.extension().string())).string();
}

std::vector<std::pair<std::string, std::string>> run_metadata(const RunConfig& config) {
    std::vector<std::pair<std::string, std::string>> extra{
        {"q_min", format_number(config.q_min)},
        {"q_max", format_number(config.q_max)},
        {"q_points", std::to_string(config.q_points)},
        {"x_points", std::to_string(config.x_points)},
        {"marginal", config.marginal == Marginal::Exact ? "exact" : "grid"},
    };
    if (config.marginal == Marginal::Grid) {
        const auto integration = config.integration_grid();
        extra.emplace_back("qp_min", format_number(integration.q_min()));
        extra.emplace_back("qp_max", format_number(integration.q_max()));
    }
    if (config.unit_length) {
        extra.emplace_back("unit_length_m", format_number(*config.unit_length));
    }
    return extra;
}

void save_with_meta(const std::string& path, const DiffractionPattern& pattern, const RunConfig& config) {
    save_pattern(path, pattern);
    write_file(path + ".meta", pattern_metadata(pattern, run_metadata(config)));
}

int cmd_simulate(const ConfigOptions& options, std::ostream& out, std::ostream& err) {
    RunConfig config;
    try {
        config = options.load();
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const Error& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        const Simulation sim = simulate(config);
        std::vector<std::pair<std::string, const DiffractionPattern*>> files;
        if (sim.one_photon && sim.diagonal) {
            files.emplace_back(with_suffix(config.output, "_one_photon"), &*sim.one_photon);
            files.emplace_back(with_suffix(config.output, "_diagonal"), &*sim.diagonal);
        } else {
            files.emplace_back(config.output, sim.one_photon ? &*sim.one_photon : &*sim.diagonal);
        }
        for (const auto& [path, pattern] : files) {
            save_with_meta(path, *pattern, config);
            out << "wrote " << path << " (" << pattern->size() << " samples)\n";
            for (const auto& d : pattern->provenance.diagnostics) {
                err << "warning: " << d.code << ": " << d.message << '\n';
            }
        }
        if (sim.joint) {
            std::ostringstream joint;
            write_joint_csv(joint, *sim.joint);
            write_file(config.joint_output, joint.str());
            out << "wrote " << config.joint_output << '\n';
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
    return kExitOk;
}

struct Summary {
    double visibility = 0.0;
    std::optional<double> spacing;
    CombSummary comb;
};

Summary summarize(const DiffractionPattern& p, double lo, double hi) {
    Summary s;
    s.visibility = visibility(p, lo, hi);
    try {
        s.spacing = peak_spacing(p);
    } catch (const InsufficientPeaks&) {
    }
    s.comb = classify_comb(p);
    return s;
}

std::string join(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out += (i ? "," : "") + format_number(values[i]);
    }
    return out;
}

void report_summary(std::ostream& out, const std::string& tag, const DiffractionPattern& p, const Summary& s) {
    out << tag << ".kernel=" << p.provenance.kernel << '\n';
    out << tag << ".detection=" << p.provenance.detection << '\n';
    out << tag << ".visibility=" << format_number(s.visibility) << '\n';
    out << tag << ".peak_spacing=" << (s.spacing ? format_number(*s.spacing) : "undefined") << '\n';
    out << tag << ".comb=" << s.comb.label << '\n';
    out << tag << ".comb_orders=integer:" << s.comb.integer_orders << ",half:" << s.comb.half_orders
        << ",other:" << s.comb.other << '\n';
    out << tag << ".peaks=" << join(s.comb.peaks) << '\n';
}

int cmd_compare(const std::string& path_a, const std::string& path_b, const std::string& output,
                const std::vector<double>& window, std::ostream& out, std::ostream& err) {
    RunConfig a;
    RunConfig b;
    try {
        a = parse_config(read_file(path_a));
        b = parse_config(read_file(path_b));
        validate(a);
        validate(b);
        for (const auto* c : {&a, &b}) {
            if (c->detection == DetectionSet::Both) {
                throw ValidationError("detection", "compare needs a single detection per config");
            }
        }
        if (!(a.q_grid() == b.q_grid())) {
            throw GridMismatch("configs sample different q grids");
        }
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const Error& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        auto pick = [](const Simulation& s) { return s.one_photon ? *s.one_photon : *s.diagonal; };
        const DiffractionPattern pa = pick(simulate(a));
        const DiffractionPattern pb = pick(simulate(b));
        const double lo = window.empty() ? a.q_min : window[0];
        const double hi = window.empty() ? a.q_max : window[1];
        const Summary sa = summarize(pa, lo, hi);
        const Summary sb = summarize(pb, lo, hi);

        out << "window=" << format_number(lo) << ',' << format_number(hi) << '\n';
        report_summary(out, "a", pa, sa);
        report_summary(out, "b", pb, sb);
        out << "visibility_ratio="
            << (sb.visibility > 0.0 ? format_number(sa.visibility / sb.visibility) : "undefined") << '\n';
        out << "spacing_ratio=" << (sa.spacing && sb.spacing ? format_number(*sa.spacing / *sb.spacing) : "undefined")
            << '\n';

        const auto na = peak_normalized(pa);
        const auto nb = peak_normalized(pb);
        double diff = 0.0;
        for (std::size_t i = 0; i < na.size(); ++i) {
            diff = std::max(diff, std::abs(na.intensity[i] - nb.intensity[i]));
        }
        out << "max_abs_difference_peak_normalized=" << format_number(diff) << '\n';

        if (!output.empty()) {
            std::ostringstream csv;
            csv << "q_norm,a,b\n";
            for (std::size_t i = 0; i < pa.size(); ++i) {
                csv << format_number(pa.q[i]) << ',' << format_number(pa.intensity[i]) << ','
                    << format_number(pb.intensity[i]) << '\n';
            }
            write_file(output, csv.str());
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
    return kExitOk;
}

struct ModelOptions {
    std::string regime = "uniform";
    std::string detection = "one-photon";
    double d = 1.0;
    double s = 0.5;
    std::optional<double> w;
    double scale = 1.0;
    double background = 0.0;
    double q_offset = 0.0;
    int slits = 20;

    void attach(CLI::App* app) {
        app->add_option("--regime", regime, "delta, uniform or gaussian")->capture_default_str();
        app->add_option("--detection", detection, "one-photon or two-photon-diagonal")->capture_default_str();
        app->add_option("--d", d, "period, in nominal periods")->capture_default_str();
        app->add_option("--s", s, "slit width, in nominal periods")->capture_default_str();
        app->add_option("--w", w, "Gaussian correlation width, in nominal periods");
        app->add_option("--scale", scale)->capture_default_str();
        app->add_option("--background", background)->capture_default_str();
        app->add_option("--q_offset", q_offset)->capture_default_str();
        app->add_option("--slits", slits, "slit count N")->capture_default_str();
    }

    FitParams params() const {
        FitParams p;
        p.d = d;
        p.s = s;
        p.w = w;
        p.scale = scale;
        p.background = background;
        p.q_offset = q_offset;
        if (!p.w && parse_kernel_kind(regime) == KernelKind::Gaussian) {
            p.w = kMeasuredCorrelationWidth * d;
        }
        validate(p);
        return p;
    }

    FitOptions fit_options() const {
        FitOptions o;
        o.slit_count = slits;
        return o;
    }
};

std::string params_text(const FitParams& p) {
    std::ostringstream out;
    out << "scale=" << format_number(p.scale) << '\n';
    out << "background=" << format_number(p.background) << '\n';
    out << "d=" << format_number(p.d) << '\n';
    out << "s=" << format_number(p.s) << '\n';
    if (p.w) {
        out << "w=" << format_number(*p.w) << '\n';
    }
    out << "q_offset=" << format_number(p.q_offset) << '\n';
    return out.str();
}

int cmd_synth(const ModelOptions& model, double q_min, double q_max, std::size_t q_points, double noise,
              std::uint64_t seed, const std::string& output, std::ostream& out, std::ostream& err) {
    KernelKind regime{};
    Detection detection{};
    FitParams params;
    FitOptions options;
    std::vector<double> q;
    try {
        regime = parse_kernel_kind(model.regime);
        detection = parse_detection(model.detection);
        params = model.params();
        options = model.fit_options();
        if (!(q_min < q_max) || q_points < 2) {
            throw ValidationError("q_points", "need q_min < q_max and at least 2 points");
        }
        const QGrid grid(q_min, q_max, q_points);
        q = grid.normalized_values();
    } catch (const Error& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        const auto pattern = synthesize(regime, detection, params, options, q, noise, seed);
        save_pattern(output, pattern);
        std::ostringstream meta;
        meta << "regime=" << to_string(regime) << '\n';
        meta << "detection=" << to_string(detection) << '\n';
        meta << params_text(params);
        meta << "slits=" << options.slit_count << '\n';
        meta << "noise=" << format_number(noise) << '\n';
        meta << "seed=" << seed << '\n';
        meta << "intensity_units=arbitrary\n";
        meta << "q_units=2pi/d\n";
        write_file(output + ".meta", meta.str());
        out << "wrote " << output << " (" << pattern.size() << " samples)\n";
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
    return kExitOk;
}

std::set<FitParam> parse_free(const std::string& text) {
    std::set<FitParam> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) {
            out.insert(parse_fit_param(item));
        }
    }
    return out;
}

void print_fit(std::ostream& out, const FitResult& r, KernelKind regime, Detection detection, std::size_t points) {
    out << "fit: " << to_string(regime) << ' ' << to_string(detection) << ", " << points << " points, " << r.starts
        << (r.starts == 1 ? " start" : " starts") << '\n';
    auto line = [&](FitParam param, double value) {
        out << "  " << std::left << std::setw(11) << to_string(param) << "= " << format_number(value);
        if (const auto it = r.standard_errors.find(param); it != r.standard_errors.end()) {
            out << " +- " << format_number(it->second);
        } else {
            out << " (fixed)";
        }
        out << '\n';
    };
    line(FitParam::Scale, r.params.scale);
    line(FitParam::Background, r.params.background);
    line(FitParam::Period, r.params.d);
    line(FitParam::SlitWidth, r.params.s);
    if (r.params.w) {
        line(FitParam::Width, *r.params.w);
    }
    line(FitParam::QOffset, r.params.q_offset);
    out << "  d/s        = " << format_number(r.params.d / r.params.s) << '\n';
    out << "  residual_rms = " << format_number(r.residual_rms) << '\n';
    out << (r.converged ? "converged" : "NOT converged") << " after " << r.n_iterations
        << " iterations (gradient " << format_number(r.gradient_norm) << ")\n";
}

int cmd_fit(const std::string& data_path, const ModelOptions& model, const std::string& free_text,
            int max_iterations, const std::string& output, std::ostream& out, std::ostream& err) {
    KernelKind regime{};
    Detection detection{};
    FitParams init;
    FitOptions options;
    std::set<FitParam> free;
    try {
        regime = parse_kernel_kind(model.regime);
        detection = parse_detection(model.detection);
        init = model.params();
        options = model.fit_options();
        options.max_iterations = max_iterations;
        free = parse_free(free_text);
    } catch (const Error& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        const auto data = load_pattern(data_path);
        const auto result = fit_pattern(data, regime, detection, free, init, options);
        print_fit(out, result, regime, detection, data.size());
        if (!output.empty()) {
            write_file(output, fit_result_text(result, regime, detection));
        }
        if (!result.converged) {
            err << "warning: fit did not converge; reporting the best point found\n";
            return kExitNotConverged;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
    return kExitOk;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Biphoton diffraction and interference patterns behind 1D gratings"};
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate", "compute one-photon and/or diagonal two-photon patterns");
    ConfigOptions sim_options;
    sim_options.attach(sim);

    auto* cmp = app.add_subcommand("compare", "compare the patterns of two configs on a shared q grid");
    std::string cmp_a;
    std::string cmp_b;
    std::string cmp_output;
    std::vector<double> window;
    cmp->add_option("config_a", cmp_a)->required();
    cmp->add_option("config_b", cmp_b)->required();
    cmp->add_option("-o,--output", cmp_output, "aligned CSV q_norm,a,b");
    cmp->add_option("--window", window, "visibility window LO HI (default: whole grid)")->expected(2);

    auto* fit = app.add_subcommand("fit", "fit a pattern CSV to a forward model");
    std::string data_path;
    std::string free_text = "scale,background,d,s";
    int max_iterations = 2000;
    std::string fit_output;
    ModelOptions fit_model;
    fit->add_option("data", data_path, "pattern CSV (q_norm,intensity)")->required();
    fit->add_option("--free", free_text, "comma-separated free parameters")->capture_default_str();
    fit->add_option("--max-iterations", max_iterations)->capture_default_str();
    fit->add_option("-o,--output", fit_output, "key=value result file");
    fit_model.attach(fit);

    auto* syn = app.add_subcommand("synth", "write synthetic pattern data from a forward model");
    ModelOptions syn_model;
    double q_min = -4.0;
    double q_max = 4.0;
    std::size_t q_points = 801;
    double noise = 0.0;
    std::uint64_t seed = 0;
    std::string syn_output;
    syn_model.attach(syn);
    syn->add_option("--q_min", q_min)->capture_default_str();
    syn->add_option("--q_max", q_max)->capture_default_str();
    syn->add_option("--q_points", q_points)->capture_default_str();
    syn->add_option("--noise", noise, "noise standard deviation as a fraction of the peak")->capture_default_str();
    syn->add_option("--seed", seed)->capture_default_str();
    syn->add_option("-o,--output", syn_output)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (sim->parsed()) {
        return cmd_simulate(sim_options, out, err);
    }
    if (cmp->parsed()) {
        return cmd_compare(cmp_a, cmp_b, cmp_output, window, out, err);
    }
    if (fit->parsed()) {
        return cmd_fit(data_path, fit_model, free_text, max_iterations, fit_output, out, err);
    }
    return cmd_synth(syn_model, q_min, q_max, q_points, noise, seed, syn_output, out, err);
}

} // namespace biphoton
