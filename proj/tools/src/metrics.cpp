#include "obslab/cli/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "obslab/cli/scenario_file.hpp"

namespace obslab::cli {

namespace {

double rms(double sum_sq, std::size_t count) { return count ? std::sqrt(sum_sq / static_cast<double>(count)) : 0.0; }

}  // namespace

double difference_jitter(const SimTrace& trace, std::string_view column, double t_from) {
    const auto t = trace.column("t");
    const auto x = trace.column(column);
    std::vector<double> d;
    for (std::size_t i = 1; i < trace.rows(); ++i) {
        if (t[i - 1] >= t_from) d.push_back(x[i] - x[i - 1]);
    }
    if (d.size() < 2) return 0.0;
    double mean = 0.0;
    for (double v : d) mean += v;
    mean /= static_cast<double>(d.size());
    double ss = 0.0;
    for (double v : d) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(d.size()));
}

ErrorBoundCheck error_bound_check(const SimTrace& trace, const control::GainVector& k, double t_from) {
    ErrorBoundCheck c;
    c.t_from = t_from;
    c.lambda = numkit::min_decay_rate(k.polynomial());
    const std::size_t n = k.size();
    const auto t = trace.column("t");
    const auto phi = trace.column("phi");
    c.observed.assign(n, 0.0);
    for (std::size_t r = 0; r < trace.rows(); ++r) {
        if (t[r] < t_from) continue;
        c.phi_sup = std::max(c.phi_sup, phi[r]);
        for (std::size_t i = 0; i < n; ++i) {
            c.observed[i] = std::max(c.observed[i], std::abs(trace.column("e" + std::to_string(i + 1))[r]));
        }
    }
    c.holds = true;
    for (std::size_t i = 1; i <= n; ++i) {
        c.bound.push_back(control::slotine_error_bound(c.phi_sup, c.lambda, n, i));
        c.holds = c.holds && c.observed[i - 1] <= c.bound.back();
    }
    return c;
}

MetricsReport compute_metrics(const SimTrace& trace, double settle_time, std::span<const double> gains) {
    MetricsReport m;
    m.samples = trace.rows();
    m.settle_time = settle_time;
    if (m.samples == 0) return m;

    const auto t = trace.column("t");
    const auto e1 = trace.column("e1");
    const auto f = trace.column("f");
    const auto fhat = trace.column("fhat");
    const auto u = trace.column("u");
    const auto sat = trace.column("saturated");
    m.t_end = t.back();

    double se = 0.0, sf = 0.0, sfh = 0.0, duty = 0.0;
    std::size_t window = 0;
    for (std::size_t i = 0; i < m.samples; ++i) {
        se += e1[i] * e1[i];
        duty += sat[i];
        m.max_abs_u = std::max(m.max_abs_u, std::abs(u[i]));
        if (t[i] > settle_time) m.max_abs_e1_after_settle = std::max(m.max_abs_e1_after_settle, std::abs(e1[i]));
        if (t[i] >= settle_time) {
            const double d = fhat[i] - f[i];
            sfh += d * d;
            sf += f[i] * f[i];
            ++window;
        }
    }
    m.rms_e1 = rms(se, m.samples);
    m.saturation_duty = duty / static_cast<double>(m.samples);
    m.fhat_rms_error = rms(sfh, window);
    m.f_rms = rms(sf, window);
    m.fhat_relative_error = m.f_rms > 0.0 ? m.fhat_rms_error / m.f_rms : 0.0;

    if (trace.has("z1")) {
        std::vector<std::span<const double>> z;
        for (std::size_t i = 1; trace.has("z" + std::to_string(i)); ++i) z.push_back(trace.column("z" + std::to_string(i)));
        double sz = 0.0;
        std::size_t count = 0;
        for (std::size_t r = 0; r < m.samples; ++r) {
            if (t[r] < 0.5 * m.t_end) continue;
            for (const auto& col : z) sz += col[r] * col[r];
            ++count;
        }
        m.steady_z_norm = rms(sz, count);
    }
    if (trace.has("xhat2")) {
        m.xhat2_jitter = difference_jitter(trace, "xhat2", 1.0);
        m.y_jitter = difference_jitter(trace, "y", 1.0);
        const auto noise = trace.column("noise");
        const bool noisy = std::any_of(noise.begin(), noise.end(), [](double v) { return v != 0.0; });
        if (noisy && *m.y_jitter > 0.0) m.noise_amplification = *m.xhat2_jitter / *m.y_jitter;
    }
    if (!gains.empty() && m.t_end > 3.0) {
        m.error_bound = error_bound_check(trace, control::GainVector({gains.begin(), gains.end()}));
    }
    return m;
}

std::string metrics_json(const MetricsReport& m, const simkit::Scenario& s, const simkit::ScenarioSetup* setup) {
    using nlohmann::ordered_json;
    auto opt = [](const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); };

    ordered_json j;
    j["scenario"] = s.name;
    j["controller"] = std::string(to_string(s.controller.kind));
    j["estimator"] = s.estimator ? std::string(to_string(s.estimator->kind)) : std::string("none");
    j["samples"] = m.samples;
    j["t_end"] = m.t_end;
    j["settle_time"] = m.settle_time;
    j["rms_e1"] = m.rms_e1;
    j["max_abs_e1_after_settle"] = m.max_abs_e1_after_settle;
    j["fhat_rms_error"] = m.fhat_rms_error;
    j["f_rms"] = m.f_rms;
    j["fhat_relative_error"] = m.fhat_relative_error;
    j["saturation_duty"] = m.saturation_duty;
    j["max_abs_u"] = m.max_abs_u;
    j["steady_z_norm"] = opt(m.steady_z_norm);
    j["xhat2_jitter"] = opt(m.xhat2_jitter);
    j["y_jitter"] = opt(m.y_jitter);
    j["noise_amplification"] = opt(m.noise_amplification);
    if (m.error_bound) {
        const auto& c = *m.error_bound;
        ordered_json check;
        check["t_from"] = c.t_from;
        check["lambda"] = c.lambda;
        check["phi_sup"] = c.phi_sup;
        check["bound"] = c.bound;
        check["observed"] = c.observed;
        check["holds"] = c.holds;
        j["error_bound_check"] = check;
    }
    if (setup) {
        const auto& b = setup->bounds;
        j["bounds"] = {{"l_u", b.l_u}, {"l_g", b.l_g}, {"l_inf", b.l_inf}, {"l_sup", b.l_sup},
                       {"l_1", b.l_1}, {"l_h", b.l_h}, {"l_B", b.l_B}};
        if (setup->estimator) j["stability_step_bound"] = simkit::stability_step_bound(*setup->estimator);
    }
    return j.dump(2) + "\n";
}

}  // namespace obslab::cli
