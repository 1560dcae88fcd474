#pragma once

#include <optional>
#include <string>

#include "obslab/simkit.hpp"
#include "obslab/trace.hpp"

namespace obslab::cli {

/// Soft check of |e_i| <= 2^{i-1} phi / lambda^{n-i+1} on the tail of a run,
/// with phi the sup of the logged phi column there. Reported, never asserted.
struct ErrorBoundCheck {
    double t_from = 3.0;
    double lambda = 0.0;
    double phi_sup = 0.0;
    std::vector<double> bound;     // per e_i
    std::vector<double> observed;  // max |e_i| over the tail
    bool holds = false;
};

/// Summary numbers computed from a trace alone.
struct MetricsReport {
    std::size_t samples = 0;
    double t_end = 0.0;
    double settle_time = 2.0;

    double rms_e1 = 0.0;                   // whole run
    double max_abs_e1_after_settle = 0.0;  // t > settle_time
    double fhat_rms_error = 0.0;           // over [settle_time, t_end]
    double f_rms = 0.0;                    // same window
    double fhat_relative_error = 0.0;      // fhat_rms_error / f_rms
    double saturation_duty = 0.0;          // fraction of samples with |u| at the limit
    double max_abs_u = 0.0;

    // Only when estimates are logged.
    std::optional<double> steady_z_norm;  // RMS of ||z|| over [t_end/2, t_end]
    std::optional<double> xhat2_jitter;   // std of first-differenced xhat2, t >= 1
    std::optional<double> y_jitter;       // std of first-differenced y, t >= 1
    std::optional<double> noise_amplification;  // xhat2_jitter / y_jitter when y is noisy

    std::optional<ErrorBoundCheck> error_bound;  // when gains are given and the run passes t = 3
};

ErrorBoundCheck error_bound_check(const SimTrace& trace, const control::GainVector& k, double t_from = 3.0);

/// `gains` (K of the run) enables the error-bound check.
MetricsReport compute_metrics(const SimTrace& trace, double settle_time = 2.0, std::span<const double> gains = {});

/// Standard deviation of successive differences of `column` for t >= t_from.
double difference_jitter(const SimTrace& trace, std::string_view column, double t_from);

/// JSON object; `setup` adds the bound constants the run was configured with.
std::string metrics_json(const MetricsReport& m, const simkit::Scenario& s, const simkit::ScenarioSetup* setup);

}  // namespace obslab::cli
