#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "biphoton/fitting.hpp"
#include "biphoton/rates.hpp"

namespace biphoton {

/// Header `q_norm,intensity`, one row per sample, shortest round-trip
/// decimals, '\n' line endings.
void write_pattern_csv(std::ostream& out, const DiffractionPattern& pattern);

/// Reads the format above. Blank lines are skipped and a trailing '\r' is
/// tolerated. Throws ParseError (1-based line) for a missing header,
/// malformed rows and files without at least two rows.
DiffractionPattern read_pattern_csv(std::istream& in);

/// Long form `q_norm,qp_norm,rate`, rows in q-major order.
void write_joint_csv(std::ostream& out, const JointRate& joint);

/// key=value lines describing where a pattern came from.
std::string pattern_metadata(const DiffractionPattern& pattern,
                             const std::vector<std::pair<std::string, std::string>>& extra = {});

/// key=value lines with every FitResult field.
std::string fit_result_text(const FitResult& result, KernelKind regime, Detection detection);

/// Whole-file helpers; throw IoError when the file cannot be opened or
/// written.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);
DiffractionPattern load_pattern(const std::string& path);
void save_pattern(const std::string& path, const DiffractionPattern& pattern);

} // namespace biphoton
