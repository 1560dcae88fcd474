#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "obslab/trace.hpp"

// gnuplot scripts that read the CSV outputs by relative path.
namespace obslab::cli {

/// Panel set for one run: tracking, error, f vs fhat, control, and the
/// velocity estimate when the trace carries one.
std::string trace_plot_script(const SimTrace& trace, std::string_view csv_name, std::string_view title);

/// Overlay of e1 and fhat - f for several runs; `runs` holds (label, csv path).
std::string compare_plot_script(const std::vector<std::pair<std::string, std::string>>& runs);

/// |H| and phase of both differentiator structures from a freqresp CSV.
std::string freqresp_plot_script(std::string_view csv_name, std::size_t channel);

}  // namespace obslab::cli
