#include "obslab/approximators.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "obslab/errors.hpp"

namespace obslab::approximators {

namespace {

double dot(std::span<const double> a, std::span<const double> b, const char* who) {
    if (a.size() != b.size()) throw std::invalid_argument(std::string(who) + ": length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::vector<double> scaled_copy(std::span<const double> v, double s) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = s * v[i];
    return out;
}

}  // namespace

MembershipGrid::MembershipGrid(std::vector<std::vector<Gaussian>> per_dimension) : sets_(std::move(per_dimension)) {
    if (sets_.empty()) throw std::invalid_argument("MembershipGrid: need at least one input dimension");
    rules_ = 1;
    for (const auto& dim : sets_) {
        if (dim.empty()) throw std::invalid_argument("MembershipGrid: empty membership list");
        for (const auto& g : dim) {
            if (!(g.width > 0.0) || !std::isfinite(g.center)) {
                throw std::invalid_argument("MembershipGrid: widths must be positive and centers finite");
            }
        }
        rules_ *= dim.size();
    }
}

MembershipGrid MembershipGrid::uniform(std::size_t dims, std::vector<Gaussian> sets) {
    return MembershipGrid(std::vector<std::vector<Gaussian>>(dims, std::move(sets)));
}

MembershipGrid MembershipGrid::five_set(std::size_t dims) {
    constexpr double pi = std::numbers::pi;
    const double w = pi / 24.0;
    return uniform(dims, {{-pi / 6.0, w}, {-pi / 12.0, w}, {0.0, w}, {pi / 12.0, w}, {pi / 6.0, w}});
}

double membership_eval(double x, const MembershipGrid& grid, std::size_t dim, std::size_t index) {
    const auto& g = grid.sets(dim).at(index);
    const double r = (x - g.center) / g.width;
    return std::exp(-r * r);
}

std::vector<double> fuzzy_basis(std::span<const double> x, const MembershipGrid& grid) {
    const std::size_t dims = grid.dimensions();
    if (x.size() != dims) throw std::invalid_argument("fuzzy_basis: input dimension mismatch");

    std::vector<double> xi(grid.rule_count(), 1.0);
    // Tensor product, last dimension fastest.
    std::size_t stride = grid.rule_count();
    for (std::size_t d = 0; d < dims; ++d) {
        const std::size_t p = grid.count(d);
        stride /= p;
        std::vector<double> mu(p);
        for (std::size_t l = 0; l < p; ++l) mu[l] = membership_eval(x[d], grid, d, l);
        for (std::size_t r = 0; r < xi.size(); ++r) xi[r] *= mu[(r / stride) % p];
    }
    double total = 0.0;
    for (double v : xi) total += v;
    if (!(total > 1e-300)) {
        std::ostringstream msg;
        msg << "fuzzy_basis: total firing strength underflowed at x = (";
        for (std::size_t d = 0; d < dims; ++d) msg << (d ? ", " : "") << x[d];
        msg << ")";
        throw DegenerateInputError(msg.str());
    }
    for (double& v : xi) v /= total;
    return xi;
}

double fuzzy_output(std::span<const double> theta, std::span<const double> xi) {
    return dot(theta, xi, "fuzzy_output");
}

double error_weight(std::span<const double> e, const numkit::Matrix& p) {
    if (!p.is_square() || p.rows() != e.size()) throw std::invalid_argument("error_weight: P must be n x n");
    const std::size_t last = p.cols() - 1;
    double s = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) s += e[i] * p(i, last);
    return s;
}

std::vector<double> fuzzy_adapt_rhs(std::span<const double> e, const numkit::Matrix& p, std::span<const double> xi,
                                    double gamma) {
    return scaled_copy(xi, -gamma * error_weight(e, p));
}

double rbf_gaussian(std::span<const double> x, std::span<const double> center, double width) {
    if (x.size() != center.size()) throw std::invalid_argument("rbf_gaussian: dimension mismatch");
    if (!(width > 0.0)) throw std::invalid_argument("rbf_gaussian: width must be positive");
    double d2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) d2 += (x[i] - center[i]) * (x[i] - center[i]);
    return std::exp(-d2 / (width * width));
}

RbfLayout RbfLayout::diagonal(std::size_t dims, std::size_t nodes, double half_range, double width) {
    if (dims == 0 || nodes == 0) throw std::invalid_argument("RbfLayout::diagonal: empty layout");
    RbfLayout out;
    for (std::size_t j = 0; j < nodes; ++j) {
        const double span = static_cast<double>(nodes - 1);
        const double c = nodes == 1 ? 0.0 : half_range * (2.0 * static_cast<double>(j) - span) / span;
        out.centers.emplace_back(dims, c);
        out.widths.push_back(width);
    }
    return out;
}

void RbfLayout::validate(std::size_t input_dims) const {
    if (centers.empty() || centers.size() != widths.size()) {
        throw std::invalid_argument("RbfLayout: need one width per center");
    }
    for (std::size_t j = 0; j < centers.size(); ++j) {
        if (centers[j].size() != input_dims) throw std::invalid_argument("RbfLayout: center dimension mismatch");
        if (!(widths[j] > 0.0)) throw std::invalid_argument("RbfLayout: widths must be positive");
    }
}

std::vector<double> rbf_hidden(std::span<const double> x, const RbfLayout& layout) {
    std::vector<double> h(layout.centers.size());
    for (std::size_t j = 0; j < h.size(); ++j) h[j] = rbf_gaussian(x, layout.centers[j], layout.widths[j]);
    return h;
}

double rbf_output(std::span<const double> w, std::span<const double> h) { return dot(w, h, "rbf_output"); }

std::vector<double> rbf_adapt_rhs(std::span<const double> e, const numkit::Matrix& p, std::span<const double> h,
                                  double gamma) {
    return scaled_copy(h, -gamma * error_weight(e, p));
}

double lyapunov_value(std::span<const double> e, const numkit::Matrix& p, std::span<const double> param_error,
                      double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("lyapunov_value: gamma must be positive");
    const auto pe = p * e;
    double quad = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) quad += e[i] * pe[i];
    double sq = 0.0;
    for (double v : param_error) sq += v * v;
    return 0.5 * quad + sq / (2.0 * gamma);
}

}  // namespace obslab::approximators
