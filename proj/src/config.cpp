#include "biphoton/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

#include "biphoton/error.hpp"

namespace biphoton {

namespace {

std::string_view trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = text.find_last_not_of(" \t\r");
    return text.substr(first, last - first + 1);
}

std::optional<double> to_double(std::string_view text) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        return std::nullopt;
    }
    return value;
}

double number(std::string_view key, std::string_view text) {
    const auto v = to_double(trim(text));
    if (!v || !std::isfinite(*v)) {
        throw ValidationError(std::string(key), "expected a number, got '" + std::string(text) + "'");
    }
    return *v;
}

std::size_t count(std::string_view key, std::string_view text) {
    text = trim(text);
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ValidationError(std::string(key), "expected a non-negative integer, got '" + std::string(text) + "'");
    }
    return value;
}

struct Unit {
    std::string_view suffix;
    double meters;
};

// Longest suffixes first so "mm" is not read as "m".
constexpr std::array<Unit, 6> kUnits{{
    {"\xC2\xB5m", 1e-6},
    {"um", 1e-6},
    {"nm", 1e-9},
    {"mm", 1e-3},
    {"cm", 1e-2},
    {"m", 1.0},
}};

// Length in period units. Physical entries for d set or use unit_length.
double length(RunConfig& config, std::string_view key, std::string_view raw) {
    const std::string_view text = trim(raw);
    if (text.empty()) {
        throw ValidationError(std::string(key), "empty value");
    }
    if (key != "d" && text.back() == 'd') {
        return number(key, text.substr(0, text.size() - 1)) * config.d;
    }
    for (const auto& unit : kUnits) {
        if (text.size() > unit.suffix.size() && text.ends_with(unit.suffix)) {
            const double meters = number(key, text.substr(0, text.size() - unit.suffix.size())) * unit.meters;
            if (key == "d") {
                if (!config.unit_length) {
                    if (!(meters > 0.0)) {
                        throw ValidationError("d", "must be > 0");
                    }
                    config.unit_length = meters;
                }
                return meters / *config.unit_length;
            }
            if (!config.unit_length) {
                throw ValidationError(std::string(key), "physical length needs d in physical units too");
            }
            return meters / *config.unit_length;
        }
    }
    return number(key, text);
}

} // namespace

std::string_view to_string(DetectionSet detection) noexcept {
    switch (detection) {
    case DetectionSet::OnePhoton:
        return "one-photon";
    case DetectionSet::Diagonal:
        return "two-photon-diagonal";
    case DetectionSet::Both:
        return "both";
    }
    return "unknown";
}

DetectionSet parse_detection_set(std::string_view text) {
    if (text == "both") {
        return DetectionSet::Both;
    }
    return parse_detection(text) == Detection::OnePhoton ? DetectionSet::OnePhoton : DetectionSet::Diagonal;
}

ApertureSpec RunConfig::aperture() const {
    return make_grating(d, s, N, A0, center_offset);
}

CorrelationKernel RunConfig::correlation() const {
    switch (kernel) {
    case KernelKind::Delta:
        return CorrelationKernel::delta();
    case KernelKind::Uniform:
        return CorrelationKernel::uniform();
    case KernelKind::Gaussian:
        if (!w) {
            throw ValidationError("w", "the gaussian kernel needs a width");
        }
        return CorrelationKernel::gaussian(*w);
    }
    throw ValidationError("kernel", "unknown kernel");
}

QGrid RunConfig::q_grid() const {
    if (!(q_min < q_max)) {
        throw ValidationError("q_min", "must be below q_max");
    }
    if (q_points < 2) {
        throw ValidationError("q_points", "need at least 2");
    }
    return QGrid(q_min, q_max, q_points, d);
}

XGrid RunConfig::x_grid() const {
    if (x_points < 2) {
        throw ValidationError("x_points", "need at least 2");
    }
    return XGrid::covering(aperture(), x_points);
}

QGrid RunConfig::integration_grid() const {
    const QGrid grid = q_grid();
    const double half =
        qp_range > 0.0 ? qp_range : std::max({std::abs(q_min), std::abs(q_max), 16.0 * d / s});
    return QGrid::symmetric(half, grid.spacing(), d);
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{
        "unit_length", "d",        "s",           "N",        "A0",          "center_offset",
        "kernel",      "w",        "q_min",       "q_max",    "q_points",    "marginal",
        "qp_range",    "x_points", "detection",   "normalization", "output", "joint_output",
    };
    return keys;
}

void set(RunConfig& config, std::string_view key, std::string_view value) {
    if (key == "unit_length") {
        const double v = number(key, value);
        if (!(v > 0.0)) {
            throw ValidationError("unit_length", "must be > 0");
        }
        config.unit_length = v;
    } else if (key == "d") {
        config.d = length(config, key, value);
    } else if (key == "s") {
        config.s = length(config, key, value);
    } else if (key == "N") {
        const std::size_t n = count(key, value);
        if (n < 1 || n > 1000000) {
            throw ValidationError("N", "must be between 1 and 1000000");
        }
        config.N = static_cast<int>(n);
    } else if (key == "A0") {
        config.A0 = number(key, value);
    } else if (key == "center_offset") {
        config.center_offset = length(config, key, value);
    } else if (key == "kernel") {
        config.kernel = parse_kernel_kind(trim(value));
    } else if (key == "w") {
        config.w = length(config, key, value);
    } else if (key == "q_min") {
        config.q_min = number(key, value);
    } else if (key == "q_max") {
        config.q_max = number(key, value);
    } else if (key == "q_points") {
        config.q_points = count(key, value);
    } else if (key == "marginal") {
        const auto v = trim(value);
        if (v == "exact") {
            config.marginal = Marginal::Exact;
        } else if (v == "grid") {
            config.marginal = Marginal::Grid;
        } else {
            throw ValidationError("marginal", "expected exact or grid");
        }
    } else if (key == "qp_range") {
        config.qp_range = number(key, value);
    } else if (key == "x_points") {
        config.x_points = count(key, value);
    } else if (key == "detection") {
        config.detection = parse_detection_set(trim(value));
    } else if (key == "normalization") {
        config.normalization = parse_normalization(trim(value));
    } else if (key == "output") {
        config.output = std::string(trim(value));
    } else if (key == "joint_output") {
        config.joint_output = std::string(trim(value));
    } else {
        throw ValidationError(std::string(key), "unknown key");
    }
}

RunConfig parse_config(std::string_view text) {
    struct Entry {
        std::size_t line;
        std::string key;
        std::string value;
    };
    std::vector<Entry> entries;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(line_no, "expected key=value, got '" + std::string(line) + "'");
        }
        const auto key = trim(line.substr(0, eq));
        if (key.empty()) {
            throw ParseError(line_no, "missing key");
        }
        for (const auto& seen : entries) {
            if (seen.key == key) {
                throw ParseError(line_no, "duplicate key '" + std::string(key) + "'");
            }
        }
        entries.push_back({line_no, std::string(key), std::string(trim(line.substr(eq + 1)))});
    }

    // unit_length, then d, then the rest in file order.
    std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        auto rank = [](const std::string& k) { return k == "unit_length" ? 0 : k == "d" ? 1 : 2; };
        return rank(a.key) < rank(b.key);
    });
    RunConfig config;
    for (const auto& e : entries) {
        try {
            set(config, e.key, e.value);
        } catch (const ValidationError& err) {
            throw ValidationError(err.field(), "line " + std::to_string(e.line) + ": " +
                                                   std::string(err.what()).substr(err.field().size() + 2));
        }
    }
    return config;
}

void validate(const RunConfig& config) {
    config.aperture();
    config.correlation();
    config.q_grid();
    config.x_grid();
    if (config.marginal == Marginal::Grid) {
        if (config.qp_range < 0.0) {
            throw ValidationError("qp_range", "must be >= 0");
        }
        config.integration_grid();
    }
    if (config.output.empty()) {
        throw ValidationError("output", "empty path");
    }
}

std::string format_number(double value) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

std::string serialize(const RunConfig& c) {
    std::ostringstream out;
    if (c.unit_length) {
        out << "unit_length=" << format_number(*c.unit_length) << '\n';
    }
    out << "d=" << format_number(c.d) << '\n';
    out << "s=" << format_number(c.s) << '\n';
    out << "N=" << c.N << '\n';
    out << "A0=" << format_number(c.A0) << '\n';
    out << "center_offset=" << format_number(c.center_offset) << '\n';
    out << "kernel=" << to_string(c.kernel) << '\n';
    if (c.w) {
        out << "w=" << format_number(*c.w) << '\n';
    }
    out << "q_min=" << format_number(c.q_min) << '\n';
    out << "q_max=" << format_number(c.q_max) << '\n';
    out << "q_points=" << c.q_points << '\n';
    out << "marginal=" << (c.marginal == Marginal::Exact ? "exact" : "grid") << '\n';
    out << "qp_range=" << format_number(c.qp_range) << '\n';
    out << "x_points=" << c.x_points << '\n';
    out << "detection=" << to_string(c.detection) << '\n';
    out << "normalization=" << to_string(c.normalization) << '\n';
    out << "output=" << c.output << '\n';
    if (!c.joint_output.empty()) {
        out << "joint_output=" << c.joint_output << '\n';
    }
    return out.str();
}

} // namespace biphoton
