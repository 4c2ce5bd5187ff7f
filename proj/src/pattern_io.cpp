#include "biphoton/pattern_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "biphoton/config.hpp"
#include "biphoton/error.hpp"

namespace biphoton {

namespace {

constexpr std::string_view kHeader = "q_norm,intensity";

double parse_field(std::string_view text, std::size_t line, std::string_view name) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
        throw ParseError(line, "bad " + std::string(name) + " value '" + std::string(text) + "'");
    }
    return value;
}

} // namespace

void write_pattern_csv(std::ostream& out, const DiffractionPattern& pattern) {
    out << kHeader << '\n';
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        out << format_number(pattern.q[i]) << ',' << format_number(pattern.intensity[i]) << '\n';
    }
}

DiffractionPattern read_pattern_csv(std::istream& in) {
    DiffractionPattern pattern;
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (!header) {
            if (line != kHeader) {
                throw ParseError(line_no, "expected header '" + std::string(kHeader) + "'");
            }
            header = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            throw ParseError(line_no, "expected two comma-separated fields");
        }
        const std::string_view view(line);
        pattern.q.push_back(parse_field(view.substr(0, comma), line_no, "q_norm"));
        const double v = parse_field(view.substr(comma + 1), line_no, "intensity");
        if (v < 0.0) {
            throw ParseError(line_no, "intensity must be >= 0");
        }
        pattern.intensity.push_back(v);
    }
    if (!header) {
        throw ParseError(line_no == 0 ? 1 : line_no, "empty file");
    }
    if (pattern.size() < 2) {
        throw ParseError(line_no, "need at least two data rows");
    }
    return pattern;
}

void write_joint_csv(std::ostream& out, const JointRate& joint) {
    out << "q_norm,qp_norm,rate\n";
    const auto q = joint.rows.normalized_values();
    const auto qp = joint.cols.normalized_values();
    for (std::size_t i = 0; i < q.size(); ++i) {
        const std::string qi = format_number(q[i]);
        for (std::size_t j = 0; j < qp.size(); ++j) {
            out << qi << ',' << format_number(qp[j]) << ','
                << format_number(joint.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) << '\n';
        }
    }
}

std::string pattern_metadata(const DiffractionPattern& pattern,
                             const std::vector<std::pair<std::string, std::string>>& extra) {
    std::ostringstream out;
    const auto& p = pattern.provenance;
    out << "kernel=" << p.kernel << '\n';
    out << "detection=" << p.detection << '\n';
    out << "aperture=" << p.aperture << '\n';
    out << "normalization=" << to_string(pattern.normalization) << '\n';
    out << "intensity_units=arbitrary\n";
    out << "q_units=2pi/d\n";
    out << "samples=" << pattern.size() << '\n';
    if (p.truncation_residual) {
        out << "truncation_residual=" << format_number(*p.truncation_residual) << '\n';
    }
    for (const auto& [key, value] : extra) {
        out << key << '=' << value << '\n';
    }
    for (std::size_t i = 0; i < p.diagnostics.size(); ++i) {
        out << "diagnostic." << i << '=' << p.diagnostics[i].code << ": " << p.diagnostics[i].message << '\n';
    }
    return out.str();
}

std::string fit_result_text(const FitResult& r, KernelKind regime, Detection detection) {
    std::ostringstream out;
    out << "regime=" << to_string(regime) << '\n';
    out << "detection=" << to_string(detection) << '\n';
    out << "scale=" << format_number(r.params.scale) << '\n';
    out << "background=" << format_number(r.params.background) << '\n';
    out << "d=" << format_number(r.params.d) << '\n';
    out << "s=" << format_number(r.params.s) << '\n';
    out << "d_over_s=" << format_number(r.params.d / r.params.s) << '\n';
    if (r.params.w) {
        out << "w=" << format_number(*r.params.w) << '\n';
    }
    out << "q_offset=" << format_number(r.params.q_offset) << '\n';
    for (const auto& [param, se] : r.standard_errors) {
        out << "stderr." << to_string(param) << '=' << format_number(se) << '\n';
    }
    out << "residual_rms=" << format_number(r.residual_rms) << '\n';
    out << "gradient_norm=" << format_number(r.gradient_norm) << '\n';
    out << "n_iterations=" << r.n_iterations << '\n';
    out << "starts=" << r.starts << '\n';
    out << "converged=" << (r.converged ? "true" : "false") << '\n';
    return out.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw IoError("error reading '" + path + "'");
    }
    return text;
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << contents;
    out.flush();
    if (!out) {
        throw IoError("error writing '" + path + "'");
    }
}

DiffractionPattern load_pattern(const std::string& path) {
    std::istringstream in(read_file(path));
    return read_pattern_csv(in);
}

void save_pattern(const std::string& path, const DiffractionPattern& pattern) {
    std::ostringstream out;
    write_pattern_csv(out, pattern);
    write_file(path, out.str());
}

} // namespace biphoton
