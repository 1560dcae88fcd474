#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "obslab/trace.hpp"

namespace obslab::cli {

/// 17 significant digits, enough to read back the same double.
std::string format_double(double v);

/// One `#` comment line listing the column order, then a header row, then
/// one row per sample. LF line endings.
void write_trace_csv(std::ostream& os, const SimTrace& trace, std::string_view scenario_name);
void write_trace_csv(const std::string& path, const SimTrace& trace, std::string_view scenario_name);

/// Skips `#` lines. Throws ConfigError on malformed input.
SimTrace read_trace_csv(std::istream& is);
SimTrace read_trace_csv(const std::string& path);

/// RFC 4180 quoting when the field holds a comma, quote or newline.
std::string csv_field(std::string_view text);

}  // namespace obslab::cli
