#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "obslab/numkit.hpp"

// Full-state baselines: product-inference fuzzy system and Gaussian RBF
// network, each with a Lyapunov-based adaptive law.
namespace obslab::approximators {

struct Gaussian {
    double center = 0.0;
    double width = 1.0;

    friend bool operator==(const Gaussian&, const Gaussian&) = default;
};

class MembershipGrid {
public:
    explicit MembershipGrid(std::vector<std::vector<Gaussian>> per_dimension);

    /// Same set of Gaussians on every one of `dims` inputs.
    static MembershipGrid uniform(std::size_t dims, std::vector<Gaussian> sets);

    /// Five sets NM, NS, Z, PS, PM centred at -pi/6 .. pi/6, width pi/24.
    static MembershipGrid five_set(std::size_t dims);

    [[nodiscard]] std::size_t dimensions() const noexcept { return sets_.size(); }
    [[nodiscard]] std::size_t count(std::size_t dim) const { return sets_.at(dim).size(); }
    [[nodiscard]] std::size_t rule_count() const noexcept { return rules_; }
    [[nodiscard]] const std::vector<Gaussian>& sets(std::size_t dim) const { return sets_.at(dim); }

private:
    std::vector<std::vector<Gaussian>> sets_;
    std::size_t rules_ = 0;
};

/// exp(-((x - c)/w)^2)
double membership_eval(double x, const MembershipGrid& grid, std::size_t dim, std::size_t index);

/// Normalized rule firing strengths, length prod(p_i). Rules are enumerated
/// lexicographically with the last input varying fastest. Throws
/// DegenerateInputError if the total firing strength underflows.
std::vector<double> fuzzy_basis(std::span<const double> x, const MembershipGrid& grid);

double fuzzy_output(std::span<const double> theta, std::span<const double> xi);

/// e^T P b for b = (0, ..., 0, 1): the last column of P dotted with e.
double error_weight(std::span<const double> e, const numkit::Matrix& p);

/// -gamma (e^T P b) xi
std::vector<double> fuzzy_adapt_rhs(std::span<const double> e, const numkit::Matrix& p, std::span<const double> xi,
                                    double gamma);

double rbf_gaussian(std::span<const double> x, std::span<const double> center, double width);

struct RbfLayout {
    std::vector<std::vector<double>> centers;
    std::vector<double> widths;

    /// Five nodes evenly spaced on the diagonal of [-0.2, 0.2]^dims, width 0.1.
    static RbfLayout diagonal(std::size_t dims, std::size_t nodes = 5, double half_range = 0.2, double width = 0.1);

    void validate(std::size_t input_dims) const;

    friend bool operator==(const RbfLayout&, const RbfLayout&) = default;
};

std::vector<double> rbf_hidden(std::span<const double> x, const RbfLayout& layout);

double rbf_output(std::span<const double> w, std::span<const double> h);

/// -gamma (e^T P b) h
std::vector<double> rbf_adapt_rhs(std::span<const double> e, const numkit::Matrix& p, std::span<const double> h,
                                  double gamma);

/// 1/2 e^T P e + 1/(2 gamma) |param_error|^2
double lyapunov_value(std::span<const double> e, const numkit::Matrix& p, std::span<const double> param_error,
                      double gamma);

struct ApproxDiagnostics {
    double omega = 0.0;  // fhat - f
    double v = 0.0;
};

}  // namespace obslab::approximators
