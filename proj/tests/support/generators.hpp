#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "obslab/numkit.hpp"

// Seeded random inputs for the property tests.
namespace obslab::testing {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

    std::size_t index(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
    }

    bool coin() { return index(0, 1) == 1; }

    std::vector<double> vector(std::size_t n, double lo, double hi) {
        std::vector<double> v(n);
        for (auto& x : v) x = uniform(lo, hi);
        return v;
    }

    /// Roots with real parts in [re_lo, re_hi], complex pairs included.
    std::vector<std::complex<double>> roots(std::size_t degree, double re_lo, double re_hi) {
        std::vector<std::complex<double>> r;
        while (r.size() < degree) {
            const double re = uniform(re_lo, re_hi);
            if (degree - r.size() >= 2 && coin()) {
                const double im = uniform(0.1, 3.0);
                r.emplace_back(re, im);
                r.emplace_back(re, -im);
            } else {
                r.emplace_back(re, 0.0);
            }
        }
        return r;
    }

    /// Monic polynomial with the given roots, highest degree first.
    static std::vector<double> poly_from_roots(const std::vector<std::complex<double>>& roots) {
        std::vector<std::complex<double>> c{1.0};
        for (const auto& z : roots) {
            std::vector<std::complex<double>> next(c.size() + 1, 0.0);
            for (std::size_t i = 0; i < c.size(); ++i) {
                next[i] += c[i];
                next[i + 1] -= z * c[i];
            }
            c = std::move(next);
        }
        std::vector<double> out;
        for (const auto& z : c) out.push_back(z.real());
        return out;
    }

    /// Hurwitz polynomial coefficients (highest first) of the given degree.
    std::vector<double> hurwitz_poly(std::size_t degree) { return poly_from_roots(roots(degree, -4.0, -0.2)); }

    /// Gain list (k_1, ..., k_n) whose polynomial is Hurwitz.
    std::vector<double> hurwitz_gains(std::size_t n) {
        const auto p = hurwitz_poly(n);
        return std::vector<double>(p.rbegin(), p.rend() - 1);
    }

    /// Negative-definite symmetric part plus a skew part, so every eigenvalue
    /// has negative real part.
    numkit::Matrix hurwitz_matrix(std::size_t n) {
        numkit::Matrix b(n, n), s(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                b(i, j) = uniform(-1.0, 1.0);
                s(i, j) = uniform(-2.0, 2.0);
            }
        }
        const auto sym = b * b.transpose() + uniform(0.1, 1.0) * numkit::Matrix::identity(n);
        return (-1.0 * sym) + (s - s.transpose());
    }

    numkit::Matrix spd_matrix(std::size_t n) {
        numkit::Matrix b(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) b(i, j) = uniform(-1.0, 1.0);
        }
        return b * b.transpose() + numkit::Matrix::identity(n);
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

}  // namespace obslab::testing
