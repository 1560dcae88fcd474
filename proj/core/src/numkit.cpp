#include "obslab/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "obslab/errors.hpp"

namespace obslab::numkit {

namespace {

constexpr double kRouthZero = 1e-12;
constexpr int kMaxQrSweeps = 500;

void require_square(const Matrix& a, const char* who) {
    if (!a.is_square() || a.rows() == 0) {
        throw std::invalid_argument(std::string(who) + ": matrix must be square and non-empty");
    }
}

// In-place balancing (Parlett-Reinsch); improves eigenvalue accuracy for the
// strongly graded companion matrices produced by small epsilon.
void balance(Matrix& a) {
    constexpr double radix = 2.0;
    constexpr double sqrdx = radix * radix;
    const std::size_t n = a.rows();
    bool done = false;
    while (!done) {
        done = true;
        for (std::size_t i = 0; i < n; ++i) {
            double r = 0.0;
            double c = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) {
                    c += std::abs(a(j, i));
                    r += std::abs(a(i, j));
                }
            }
            if (c == 0.0 || r == 0.0) {
                continue;
            }
            double g = r / radix;
            double f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sqrdx;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                g = 1.0 / f;
                for (std::size_t j = 0; j < n; ++j) a(i, j) *= g;
                for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
    }
}

// Reduction to upper Hessenberg form by stabilized elementary similarity
// transforms. Entries below the subdiagonal are zeroed on exit.
void to_hessenberg(Matrix& a) {
    const std::size_t n = a.rows();
    for (std::size_t m = 1; m + 1 < n; ++m) {
        double x = 0.0;
        std::size_t piv = m;
        for (std::size_t j = m; j < n; ++j) {
            if (std::abs(a(j, m - 1)) > std::abs(x)) {
                x = a(j, m - 1);
                piv = j;
            }
        }
        if (piv != m) {
            for (std::size_t j = m - 1; j < n; ++j) std::swap(a(piv, j), a(m, j));
            for (std::size_t j = 0; j < n; ++j) std::swap(a(j, piv), a(j, m));
        }
        if (x != 0.0) {
            for (std::size_t i = m + 1; i < n; ++i) {
                double y = a(i, m - 1);
                if (y != 0.0) {
                    y /= x;
                    a(i, m - 1) = y;
                    for (std::size_t j = m; j < n; ++j) a(i, j) -= y * a(m, j);
                    for (std::size_t j = 0; j < n; ++j) a(j, m) += y * a(j, i);
                }
            }
        }
    }
    for (std::size_t i = 2; i < n; ++i) {
        for (std::size_t j = 0; j + 1 < i; ++j) a(i, j) = 0.0;
    }
}

double sign_of(double magnitude, double s) { return s >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude); }

// Francis double-shift QR on an upper Hessenberg matrix. Indices inside are
// 1-based to keep the deflation bookkeeping readable.
std::vector<std::complex<double>> hessenberg_qr(Matrix h) {
    const int n = static_cast<int>(h.rows());
    auto a = [&h](int i, int j) -> double& { return h(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1)); };

    std::vector<double> wr(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> wi(static_cast<std::size_t>(n) + 1, 0.0);

    double anorm = 0.0;
    for (int i = 1; i <= n; ++i) {
        for (int j = std::max(i - 1, 1); j <= n; ++j) anorm += std::abs(a(i, j));
    }

    int sweeps = 0;
    int nn = n;
    double t = 0.0;
    while (nn >= 1) {
        int its = 0;
        int l = 0;
        do {
            for (l = nn; l >= 2; --l) {
                double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(a(l, l - 1)) + s == s) {
                    a(l, l - 1) = 0.0;
                    break;
                }
            }
            double x = a(nn, nn);
            if (l == nn) {
                wr[static_cast<std::size_t>(nn)] = x + t;
                wi[static_cast<std::size_t>(nn)] = 0.0;
                --nn;
            } else {
                double y = a(nn - 1, nn - 1);
                double w = a(nn, nn - 1) * a(nn - 1, nn);
                if (l == nn - 1) {
                    const double p = 0.5 * (y - x);
                    const double q = p * p + w;
                    double z = std::sqrt(std::abs(q));
                    x += t;
                    const auto i1 = static_cast<std::size_t>(nn - 1);
                    const auto i2 = static_cast<std::size_t>(nn);
                    if (q >= 0.0) {
                        z = p + sign_of(z, p);
                        wr[i1] = wr[i2] = x + z;
                        if (z != 0.0) wr[i2] = x - w / z;
                        wi[i1] = wi[i2] = 0.0;
                    } else {
                        wr[i1] = wr[i2] = x + p;
                        wi[i1] = -z;
                        wi[i2] = z;
                    }
                    nn -= 2;
                } else {
                    if (++sweeps > kMaxQrSweeps) {
                        throw ConvergenceError("eigenvalues: QR iteration did not converge within 500 sweeps");
                    }
                    if (its == 10 || its == 20) {
                        // exceptional shift
                        t += x;
                        for (int i = 1; i <= nn; ++i) a(i, i) -= x;
                        const double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    int m = nn - 2;
                    double p = 0.0;
                    double q = 0.0;
                    double r = 0.0;
                    double z = 0.0;
                    for (; m >= l; --m) {
                        z = a(m, m);
                        r = x - z;
                        double s = y - z;
                        p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
                        q = a(m + 1, m + 1) - z - r - s;
                        r = a(m + 2, m + 1);
                        s = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
                        const double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
                        if (u + v == v) break;
                    }
                    for (int i = m + 2; i <= nn; ++i) {
                        a(i, i - 2) = 0.0;
                        if (i != m + 2) a(i, i - 3) = 0.0;
                    }
                    for (int k = m; k <= nn - 1; ++k) {
                        if (k != m) {
                            p = a(k, k - 1);
                            q = a(k + 1, k - 1);
                            r = 0.0;
                            if (k != nn - 1) r = a(k + 2, k - 1);
                            x = std::abs(p) + std::abs(q) + std::abs(r);
                            if (x != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        const double s = sign_of(std::sqrt(p * p + q * q + r * r), p);
                        if (s != 0.0) {
                            if (k == m) {
                                if (l != m) a(k, k - 1) = -a(k, k - 1);
                            } else {
                                a(k, k - 1) = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for (int j = k; j <= nn; ++j) {
                                p = a(k, j) + q * a(k + 1, j);
                                if (k != nn - 1) {
                                    p += r * a(k + 2, j);
                                    a(k + 2, j) -= p * z;
                                }
                                a(k + 1, j) -= p * y;
                                a(k, j) -= p * x;
                            }
                            const int mmin = nn < k + 3 ? nn : k + 3;
                            for (int i = l; i <= mmin; ++i) {
                                p = x * a(i, k) + y * a(i, k + 1);
                                if (k != nn - 1) {
                                    p += z * a(i, k + 2);
                                    a(i, k + 2) -= p * r;
                                }
                                a(i, k + 1) -= p * q;
                                a(i, k) -= p;
                            }
                        }
                    }
                }
            }
        } while (l < nn - 1);
    }

    std::vector<std::complex<double>> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) out.emplace_back(wr[static_cast<std::size_t>(i)], wi[static_cast<std::size_t>(i)]);
    return out;
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
    if (data_.size() != rows_ * cols_) {
        throw std::invalid_argument("Matrix: rows*cols does not match entry count");
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    std::vector<double> data;
    data.reserve(r * c);
    for (const auto& row : rows) {
        if (row.size() != c) throw std::invalid_argument("Matrix::from_rows: ragged rows");
        data.insert(data.end(), row.begin(), row.end());
    }
    return Matrix(r, c, std::move(data));
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw std::invalid_argument("Matrix +: dimension mismatch");
    Matrix out = a;
    for (std::size_t i = 0; i < out.data_.size(); ++i) out.data_[i] += b.data_[i];
    return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw std::invalid_argument("Matrix -: dimension mismatch");
    Matrix out = a;
    for (std::size_t i = 0; i < out.data_.size(); ++i) out.data_[i] -= b.data_[i];
    return out;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("Matrix *: dimension mismatch");
    Matrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
        for (std::size_t k = 0; k < a.cols_; ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
        }
    return out;
}

Matrix operator*(double s, const Matrix& a) {
    Matrix out = a;
    for (auto& v : out.data_) v *= s;
    return out;
}

std::vector<double> operator*(const Matrix& a, std::span<const double> x) {
    if (a.cols() != x.size()) throw std::invalid_argument("Matrix * vector: dimension mismatch");
    std::vector<double> out(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out[i] += a(i, j) * x[j];
    return out;
}

double inf_norm(const Matrix& a) {
    double best = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) row += std::abs(a(i, j));
        best = std::max(best, row);
    }
    return best;
}

bool is_symmetric(const Matrix& a, double tol) {
    if (!a.is_square()) return false;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j)
            if (std::abs(a(i, j) - a(j, i)) > tol) return false;
    return true;
}

bool is_positive_definite(const Matrix& a) {
    if (!a.is_square() || a.rows() == 0) return false;
    // Gaussian elimination without pivoting: the k-th pivot equals the ratio
    // of consecutive leading principal minors, so all minors are positive iff
    // all pivots are.
    Matrix m = a;
    const std::size_t n = m.rows();
    for (std::size_t k = 0; k < n; ++k) {
        if (!(m(k, k) > 0.0)) return false;
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = m(i, k) / m(k, k);
            for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
        }
    }
    return true;
}

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw std::invalid_argument("Polynomial: empty coefficient list");
    if (coeffs_.front() == 0.0) throw std::invalid_argument("Polynomial: leading coefficient is zero");
    for (double c : coeffs_) {
        if (!std::isfinite(c)) throw std::invalid_argument("Polynomial: non-finite coefficient");
    }
}

std::complex<double> Polynomial::operator()(std::complex<double> s) const {
    std::complex<double> acc = 0.0;
    for (double c : coeffs_) acc = acc * s + c;
    return acc;
}

Polynomial gain_polynomial(std::span<const double> gains) {
    if (gains.empty()) throw std::invalid_argument("gain_polynomial: empty gain vector");
    std::vector<double> c;
    c.reserve(gains.size() + 1);
    c.push_back(1.0);
    for (auto it = gains.rbegin(); it != gains.rend(); ++it) c.push_back(*it);
    return Polynomial(std::move(c));
}

bool routh_hurwitz(const Polynomial& p) {
    const std::size_t deg = p.degree();
    if (deg < 1) throw std::invalid_argument("routh_hurwitz: degree must be at least 1");

    const double lead_sign = p.coeffs().front() > 0.0 ? 1.0 : -1.0;
    const std::size_t width = deg / 2 + 1;
    std::vector<double> prev(width, 0.0);
    std::vector<double> cur(width, 0.0);
    for (std::size_t i = 0; i <= deg; ++i) {
        const double c = lead_sign * p.coeffs()[i];
        if (i % 2 == 0) prev[i / 2] = c;
        else cur[i / 2] = c;
    }
    if (std::abs(prev[0]) < kRouthZero || prev[0] < 0.0) return false;
    for (std::size_t row = 1; row <= deg; ++row) {
        if (std::abs(cur[0]) < kRouthZero || cur[0] < 0.0) return false;
        if (row == deg) break;
        std::vector<double> next(width, 0.0);
        for (std::size_t j = 0; j + 1 < width; ++j) {
            next[j] = (cur[0] * prev[j + 1] - prev[0] * cur[j + 1]) / cur[0];
        }
        prev = std::move(cur);
        cur = std::move(next);
    }
    return true;
}

Companion companion_from_gains(std::span<const double> gains) {
    if (gains.empty()) throw std::invalid_argument("companion_from_gains: empty gain vector");
    const std::size_t n = gains.size();
    Companion out{Matrix(n, n), std::vector<double>(n, 0.0)};
    for (std::size_t i = 0; i + 1 < n; ++i) out.lambda(i, i + 1) = 1.0;
    for (std::size_t j = 0; j < n; ++j) out.lambda(n - 1, j) = -gains[j];
    out.b[n - 1] = 1.0;
    return out;
}

std::vector<std::complex<double>> eigenvalues(const Matrix& a) {
    require_square(a, "eigenvalues");
    for (double v : a.data()) {
        if (!std::isfinite(v)) throw std::invalid_argument("eigenvalues: non-finite entry");
    }
    Matrix h = a;
    balance(h);
    to_hessenberg(h);
    return hessenberg_qr(std::move(h));
}

std::vector<std::complex<double>> roots(const Polynomial& p) {
    const std::size_t deg = p.degree();
    if (deg == 0) return {};
    const double lead = p.coeffs().front();
    // Frobenius companion with the monic coefficients in the first row.
    Matrix c(deg, deg);
    for (std::size_t j = 0; j < deg; ++j) c(0, j) = -p.coeffs()[j + 1] / lead;
    for (std::size_t i = 1; i < deg; ++i) c(i, i - 1) = 1.0;
    return eigenvalues(c);
}

double spectral_abscissa(const Matrix& a) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& ev : eigenvalues(a)) best = std::max(best, ev.real());
    return best;
}

std::vector<double> solve_linear(Matrix a, std::vector<double> b) {
    require_square(a, "solve_linear");
    const std::size_t n = a.rows();
    if (b.size() != n) throw std::invalid_argument("solve_linear: right-hand side size mismatch");
    // Row equilibration, so the singularity test below is scale-free per row.
    for (std::size_t i = 0; i < n; ++i) {
        double big = 0.0;
        for (std::size_t j = 0; j < n; ++j) big = std::max(big, std::abs(a(i, j)));
        if (big == 0.0) throw SingularSystemError("solve_linear: matrix is numerically singular");
        for (std::size_t j = 0; j < n; ++j) a(i, j) /= big;
        b[i] /= big;
    }
    const double scale = inf_norm(a);

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (std::abs(a(piv, k)) <= 1e-14 * scale) {
            throw SingularSystemError("solve_linear: matrix is numerically singular");
        }
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(b[k], b[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            if (f == 0.0) continue;
            for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= a(ii, j) * x[j];
        x[ii] = s / a(ii, ii);
    }
    return x;
}

std::vector<std::complex<double>> solve_linear(std::vector<std::complex<double>> a,
                                               std::vector<std::complex<double>> b, std::size_t n) {
    if (a.size() != n * n || b.size() != n) throw std::invalid_argument("solve_linear: dimension mismatch");
    auto at = [&a, n](std::size_t i, std::size_t j) -> std::complex<double>& { return a[i * n + j]; };
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double big = 0.0;
        for (std::size_t j = 0; j < n; ++j) big = std::max(big, std::abs(at(i, j)));
        if (big == 0.0) throw SingularSystemError("solve_linear: complex matrix is numerically singular");
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += std::abs(at(i, j) /= big);
        b[i] /= big;
        scale = std::max(scale, row);
    }

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(at(i, k)) > std::abs(at(piv, k))) piv = i;
        if (std::abs(at(piv, k)) <= 1e-14 * scale) {
            throw SingularSystemError("solve_linear: complex matrix is numerically singular");
        }
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(at(k, j), at(piv, j));
            std::swap(b[k], b[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const auto f = at(i, k) / at(k, k);
            for (std::size_t j = k; j < n; ++j) at(i, j) -= f * at(k, j);
            b[i] -= f * b[k];
        }
    }
    std::vector<std::complex<double>> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        auto s = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= at(ii, j) * x[j];
        x[ii] = s / at(ii, ii);
    }
    return x;
}

Matrix solve_lyapunov(const Matrix& lambda, const Matrix& q) {
    require_square(lambda, "solve_lyapunov");
    if (q.rows() != lambda.rows() || q.cols() != lambda.cols()) {
        throw std::invalid_argument("solve_lyapunov: Q must match the dimension of Lambda");
    }
    if (!(spectral_abscissa(lambda) < 0.0)) {
        throw SingularSystemError("solve_lyapunov: Lambda is not Hurwitz");
    }
    const std::size_t n = lambda.rows();
    const std::size_t nn = n * n;
    // Column-major vec: vec(Lambda^T P) = (I (x) Lambda^T) vec(P),
    // vec(P Lambda) = (Lambda^T (x) I) vec(P).
    Matrix k(nn, nn);
    for (std::size_t bi = 0; bi < n; ++bi) {
        for (std::size_t bj = 0; bj < n; ++bj) {
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    double v = 0.0;
                    if (bi == bj) v += lambda(j, i);
                    if (i == j) v += lambda(bj, bi);
                    k(bi * n + i, bj * n + j) = v;
                }
            }
        }
    }
    std::vector<double> rhs(nn);
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t r = 0; r < n; ++r) rhs[c * n + r] = -q(r, c);

    const auto vec_p = solve_linear(std::move(k), std::move(rhs));
    Matrix p(n, n);
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t r = 0; r < n; ++r) p(r, c) = vec_p[c * n + r];
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double avg = 0.5 * (p(i, j) + p(j, i));
            p(i, j) = avg;
            p(j, i) = avg;
        }
    }
    return p;
}

LyapunovPair lyapunov_pair(const Matrix& lambda, const Matrix& q) {
    if (!is_symmetric(q, 0.0) || !is_positive_definite(q)) {
        throw std::invalid_argument("lyapunov_pair: Q must be symmetric positive definite");
    }
    return LyapunovPair{solve_lyapunov(lambda, q), q};
}

double lyapunov_residual(const Matrix& lambda, const Matrix& p, const Matrix& q) {
    return inf_norm(lambda.transpose() * p + p * lambda + q);
}

double min_decay_rate(const Polynomial& p) {
    if (p.degree() < 1 || !routh_hurwitz(p)) {
        throw std::invalid_argument("min_decay_rate: polynomial is not Hurwitz");
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : roots(p)) best = std::min(best, std::abs(r.real()));
    return best;
}

std::complex<double> observer_noise_tf(const Matrix& a, std::span<const double> l, std::size_t channel,
                                       double omega) {
    require_square(a, "observer_noise_tf");
    const std::size_t n = a.rows();
    if (l.size() != n) throw std::invalid_argument("observer_noise_tf: input column size mismatch");
    if (channel < 1 || channel > n) throw std::invalid_argument("observer_noise_tf: channel out of range");
    std::vector<std::complex<double>> m(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m[i * n + j] = std::complex<double>(i == j ? 0.0 : 0.0, i == j ? omega : 0.0) - a(i, j);
    std::vector<std::complex<double>> rhs(l.begin(), l.end());
    const auto x = solve_linear(std::move(m), std::move(rhs), n);
    return x[channel - 1];
}

}  // namespace obslab::numkit
