#include "obslab/cli/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <vector>

#include "obslab/cli/scenario_file.hpp"

namespace obslab::cli {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, ptr);
}

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(text);
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

void write_trace_csv(std::ostream& os, const SimTrace& trace, std::string_view scenario_name) {
    const auto& names = trace.names();
    os << "# obslab trace, scenario " << scenario_name << ", columns:";
    for (const auto& n : names) os << ' ' << n;
    os << '\n';
    for (std::size_t c = 0; c < names.size(); ++c) os << (c ? "," : "") << names[c];
    os << '\n';

    std::vector<std::span<const double>> cols;
    for (std::size_t c = 0; c < trace.cols(); ++c) cols.push_back(trace.column(c));
    std::string line;
    for (std::size_t r = 0; r < trace.rows(); ++r) {
        line.clear();
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (c) line += ',';
            line += format_double(cols[c][r]);
        }
        line += '\n';
        os << line;
    }
}

void write_trace_csv(const std::string& path, const SimTrace& trace, std::string_view scenario_name) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    write_trace_csv(out, trace, scenario_name);
    if (!out) throw ConfigError("error writing '" + path + "'");
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) return out;
        start = comma + 1;
    }
}

double parse_double(std::string_view s, std::size_t line_no) {
    if (s == "nan") return std::nan("");
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ConfigError("csv line " + std::to_string(line_no) + ": invalid number '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace

SimTrace read_trace_csv(std::istream& is) {
    std::string line;
    std::size_t line_no = 0;
    std::optional<SimTrace> trace;
    std::vector<double> row;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const auto fields = split(line);
        if (!trace) {
            trace.emplace(std::vector<std::string>(fields.begin(), fields.end()));
            continue;
        }
        if (fields.size() != trace->cols()) {
            throw ConfigError("csv line " + std::to_string(line_no) + ": expected " + std::to_string(trace->cols()) +
                              " fields, got " + std::to_string(fields.size()));
        }
        row.clear();
        for (auto f : fields) row.push_back(parse_double(f, line_no));
        trace->append(row);
    }
    if (!trace) throw ConfigError("csv: missing header row");
    return std::move(*trace);
}

SimTrace read_trace_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    return read_trace_csv(in);
}

}  // namespace obslab::cli
