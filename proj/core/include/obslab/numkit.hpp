#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

// Small dense linear algebra and polynomial helpers. Every matrix in this
// project is at most (n+1)x(n+1) with n <= 10, so all routines are unblocked
// and allocate freely.
namespace obslab::numkit {

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);

    static Matrix identity(std::size_t n);
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool is_square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    [[nodiscard]] std::span<const double> data() const noexcept { return data_; }

    [[nodiscard]] Matrix transpose() const;

    friend Matrix operator+(const Matrix& a, const Matrix& b);
    friend Matrix operator-(const Matrix& a, const Matrix& b);
    friend Matrix operator*(const Matrix& a, const Matrix& b);
    friend Matrix operator*(double s, const Matrix& a);
    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

std::vector<double> operator*(const Matrix& a, std::span<const double> x);

/// Max absolute row sum.
double inf_norm(const Matrix& a);

/// Leading-principal-minor test (Sylvester's criterion).
bool is_positive_definite(const Matrix& a);

bool is_symmetric(const Matrix& a, double tol = 0.0);

/// Real polynomial, coefficients ordered highest degree first.
class Polynomial {
public:
    explicit Polynomial(std::vector<double> coeffs);

    [[nodiscard]] std::size_t degree() const noexcept { return coeffs_.size() - 1; }
    [[nodiscard]] std::span<const double> coeffs() const noexcept { return coeffs_; }

    [[nodiscard]] std::complex<double> operator()(std::complex<double> s) const;

    friend bool operator==(const Polynomial&, const Polynomial&) = default;

private:
    std::vector<double> coeffs_;
};

/// s^n + k_n s^{n-1} + ... + k_1 for gains (k_1, ..., k_n).
Polynomial gain_polynomial(std::span<const double> gains);

/// True iff every root lies strictly in the open left half plane. First-column
/// entries of the Routh array with magnitude below 1e-12 count as failure.
bool routh_hurwitz(const Polynomial& p);

struct Companion {
    Matrix lambda;          // n x n, ones on the superdiagonal
    std::vector<double> b;  // (0, ..., 0, 1)
};

/// Companion realization of s^n + k_n s^{n-1} + ... + k_1. The bottom row is
/// (-k_1, ..., -k_n), lowest-order coefficient leftmost.
Companion companion_from_gains(std::span<const double> gains);

/// Eigenvalues of a general real square matrix via balancing, Hessenberg
/// reduction and Francis double-shift QR. Throws ConvergenceError after 500
/// QR sweeps.
std::vector<std::complex<double>> eigenvalues(const Matrix& a);

std::vector<std::complex<double>> roots(const Polynomial& p);

/// Largest real part over the spectrum of `a`.
double spectral_abscissa(const Matrix& a);

/// Solves A x = b by Gaussian elimination with partial pivoting.
std::vector<double> solve_linear(Matrix a, std::vector<double> b);

std::vector<std::complex<double>> solve_linear(std::vector<std::complex<double>> a,
                                               std::vector<std::complex<double>> b,
                                               std::size_t n);

/// P with Lambda^T P + P Lambda = -Q, solved through the Kronecker form
/// (I (x) Lambda^T + Lambda^T (x) I) vec(P) = -vec(Q).
Matrix solve_lyapunov(const Matrix& lambda, const Matrix& q);

struct LyapunovPair {
    Matrix p;
    Matrix q;
};

LyapunovPair lyapunov_pair(const Matrix& lambda, const Matrix& q);

/// ||Lambda^T P + P Lambda + Q||_inf
double lyapunov_residual(const Matrix& lambda, const Matrix& p, const Matrix& q);

/// min |Re(root)| of a Hurwitz polynomial.
double min_decay_rate(const Polynomial& p);

/// e_i^T (j w I - A)^{-1} L with a 1-based output channel.
std::complex<double> observer_noise_tf(const Matrix& a, std::span<const double> l,
                                       std::size_t channel, double omega);

}  // namespace obslab::numkit
