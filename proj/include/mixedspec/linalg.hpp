#pragma once

// Dense symmetric linear algebra for small matrices: Cholesky, cyclic Jacobi,
// Householder tridiagonalization with implicit-shift QL, Kronecker products.
// Everything is templated on the scalar so studies can run in long double.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace mixedspec {

template <class Real>
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols)
        : rows_(rows), cols_(cols),
          data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), Real(0)) {}

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = Real(1);
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Real& operator()(int i, int j) { return data_[std::size_t(i) * cols_ + j]; }
    const Real& operator()(int i, int j) const { return data_[std::size_t(i) * cols_ + j]; }

    std::vector<Real>& data() { return data_; }
    const std::vector<Real>& data() const { return data_; }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    // Copies the strict upper triangle onto the lower one.
    void mirror_upper() {
        for (int i = 0; i < rows_; ++i)
            for (int j = i + 1; j < cols_; ++j) (*this)(j, i) = (*this)(i, j);
    }

    Real max_abs() const {
        Real m(0);
        for (const Real& v : data_) m = std::max(m, std::abs(v));
        return m;
    }

    Real frobenius_norm() const {
        Real s(0);
        for (const Real& v : data_) s += v * v;
        return std::sqrt(s);
    }

    bool is_symmetric() const {
        if (rows_ != cols_) return false;
        for (int i = 0; i < rows_; ++i)
            for (int j = i + 1; j < cols_; ++j)
                if ((*this)(i, j) != (*this)(j, i)) return false;
        return true;
    }

    std::vector<Real> apply(const std::vector<Real>& x) const {
        std::vector<Real> y(rows_, Real(0));
        for (int i = 0; i < rows_; ++i) {
            Real s(0);
            for (int j = 0; j < cols_; ++j) s += (*this)(i, j) * x[j];
            y[i] = s;
        }
        return y;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        Matrix c(a.rows_, b.cols_);
        for (int i = 0; i < a.rows_; ++i)
            for (int k = 0; k < a.cols_; ++k) {
                const Real aik = a(i, k);
                if (aik == Real(0)) continue;
                for (int j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend Matrix operator+(const Matrix& a, const Matrix& b) {
        Matrix c(a.rows_, a.cols_);
        for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] = a.data_[i] + b.data_[i];
        return c;
    }

    friend Matrix operator-(const Matrix& a, const Matrix& b) {
        Matrix c(a.rows_, a.cols_);
        for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] = a.data_[i] - b.data_[i];
        return c;
    }

    friend Matrix operator*(Real s, const Matrix& a) {
        Matrix c(a.rows_, a.cols_);
        for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] = s * a.data_[i];
        return c;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Real> data_;
};

// Cholesky pivot failure; carries the 0-based index of the offending pivot.
class not_spd_error : public std::runtime_error {
public:
    explicit not_spd_error(int pivot_index)
        : std::runtime_error("matrix is not positive definite (pivot " +
                             std::to_string(pivot_index) + ")"),
          pivot_index(pivot_index) {}
    int pivot_index;
};

// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
template <class Real>
Matrix<Real> cholesky_lower(const Matrix<Real>& a) {
    const int n = a.rows();
    Matrix<Real> l(n, n);
    for (int j = 0; j < n; ++j) {
        Real d = a(j, j);
        for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > Real(0))) throw not_spd_error(j);
        const Real ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (int i = j + 1; i < n; ++i) {
            Real s = a(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }
    return l;
}

// Solves L y = b in place.
template <class Real>
void forward_substitute(const Matrix<Real>& l, std::vector<Real>& b) {
    const int n = l.rows();
    for (int i = 0; i < n; ++i) {
        Real s = b[i];
        for (int k = 0; k < i; ++k) s -= l(i, k) * b[k];
        b[i] = s / l(i, i);
    }
}

// Solves L^T x = b in place.
template <class Real>
void back_substitute_transposed(const Matrix<Real>& l, std::vector<Real>& b) {
    const int n = l.rows();
    for (int i = n - 1; i >= 0; --i) {
        Real s = b[i];
        for (int k = i + 1; k < n; ++k) s -= l(k, i) * b[k];
        b[i] = s / l(i, i);
    }
}

// Solves (L L^T) x = b.
template <class Real>
std::vector<Real> cholesky_solve(const Matrix<Real>& l, std::vector<Real> b) {
    forward_substitute(l, b);
    back_substitute_transposed(l, b);
    return b;
}

// Neumaier-compensated dot product; keeps quadratic forms of stiff matrices
// accurate enough for the superconvergence studies.
template <class Real>
Real dot_compensated(const std::vector<Real>& x, const std::vector<Real>& y) {
    Real sum(0), comp(0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const Real term = x[i] * y[i];
        const Real t = sum + term;
        if (std::abs(sum) >= std::abs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
    }
    return sum + comp;
}

template <class Real>
Real quadratic_form(const Matrix<Real>& a, const std::vector<Real>& x) {
    return dot_compensated(a.apply(x), x);
}

template <class Real>
Real norm2(const std::vector<Real>& x) {
    Real s(0);
    for (const Real& v : x) s += v * v;
    return std::sqrt(s);
}

template <class Real>
struct SymEigResult {
    std::vector<Real> values;  // ascending
    Matrix<Real> vectors;      // columns, orthonormal; empty if not requested
};

namespace detail {

template <class Real>
void sort_eig_ascending(std::vector<Real>& d, Matrix<Real>& z, bool with_vectors) {
    const int n = static_cast<int>(d.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return d[a] < d[b]; });
    std::vector<Real> ds(n);
    for (int i = 0; i < n; ++i) ds[i] = d[order[i]];
    d = std::move(ds);
    if (with_vectors) {
        Matrix<Real> zs(n, n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) zs(i, j) = z(i, order[j]);
        z = std::move(zs);
    }
}

// Cyclic Jacobi. Quadratically convergent and very accurate for the small
// pencils this library produces.
template <class Real>
SymEigResult<Real> jacobi_eig(Matrix<Real> a, bool want_vectors) {
    const int n = a.rows();
    Matrix<Real> v = Matrix<Real>::identity(n);
    const Real eps = std::numeric_limits<Real>::epsilon();
    const Real frob = a.frobenius_norm();
    const int max_sweeps = std::max(50, 30 * n);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        Real off(0);
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        off = std::sqrt(Real(2) * off);
        if (off <= Real(50) * eps * frob || off == Real(0)) break;

        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const Real apq = a(p, q);
                if (std::abs(apq) <= eps * (std::abs(a(p, p)) + std::abs(a(q, q))) / Real(2e3))
                    continue;
                const Real theta = (a(q, q) - a(p, p)) / (Real(2) * apq);
                const Real t = (theta >= Real(0))
                                   ? Real(1) / (theta + std::sqrt(theta * theta + Real(1)))
                                   : Real(-1) / (-theta + std::sqrt(theta * theta + Real(1)));
                const Real c = Real(1) / std::sqrt(t * t + Real(1));
                const Real s = t * c;
                const Real tau = s / (Real(1) + c);

                const Real app = a(p, p), aqq = a(q, q);
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = Real(0);
                a(q, p) = Real(0);
                for (int k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const Real akp = a(k, p), akq = a(k, q);
                    a(k, p) = akp - s * (akq + tau * akp);
                    a(p, k) = a(k, p);
                    a(k, q) = akq + s * (akp - tau * akq);
                    a(q, k) = a(k, q);
                }
                if (want_vectors) {
                    for (int k = 0; k < n; ++k) {
                        const Real vkp = v(k, p), vkq = v(k, q);
                        v(k, p) = vkp - s * (vkq + tau * vkp);
                        v(k, q) = vkq + s * (vkp - tau * vkq);
                    }
                }
            }
        }
    }

    SymEigResult<Real> r;
    r.values.resize(n);
    for (int i = 0; i < n; ++i) r.values[i] = a(i, i);
    if (want_vectors) r.vectors = std::move(v);
    sort_eig_ascending(r.values, r.vectors, want_vectors);
    return r;
}

// Householder reduction of a symmetric matrix to tridiagonal form, with the
// orthogonal transform accumulated into `a` (classic tred2 structure).
template <class Real>
void tridiagonalize(Matrix<Real>& a, std::vector<Real>& d, std::vector<Real>& e) {
    const int n = a.rows();
    d.assign(n, Real(0));
    e.assign(n, Real(0));

    for (int i = n - 1; i >= 1; --i) {
        const int l = i - 1;
        Real h(0), scale(0);
        if (l > 0) {
            for (int k = 0; k <= l; ++k) scale += std::abs(a(i, k));
            if (scale == Real(0)) {
                e[i] = a(i, l);
            } else {
                for (int k = 0; k <= l; ++k) {
                    a(i, k) /= scale;
                    h += a(i, k) * a(i, k);
                }
                Real f = a(i, l);
                Real g = (f >= Real(0)) ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                a(i, l) = f - g;
                f = Real(0);
                for (int j = 0; j <= l; ++j) {
                    a(j, i) = a(i, j) / h;
                    g = Real(0);
                    for (int k = 0; k <= j; ++k) g += a(j, k) * a(i, k);
                    for (int k = j + 1; k <= l; ++k) g += a(k, j) * a(i, k);
                    e[j] = g / h;
                    f += e[j] * a(i, j);
                }
                const Real hh = f / (h + h);
                for (int j = 0; j <= l; ++j) {
                    f = a(i, j);
                    e[j] = g = e[j] - hh * f;
                    for (int k = 0; k <= j; ++k) a(j, k) -= f * e[k] + g * a(i, k);
                }
            }
        } else {
            e[i] = a(i, l);
        }
        d[i] = h;
    }

    d[0] = Real(0);
    e[0] = Real(0);
    for (int i = 0; i < n; ++i) {
        const int l = i - 1;
        if (d[i] != Real(0)) {
            for (int j = 0; j <= l; ++j) {
                Real g(0);
                for (int k = 0; k <= l; ++k) g += a(i, k) * a(k, j);
                for (int k = 0; k <= l; ++k) a(k, j) -= g * a(k, i);
            }
        }
        d[i] = a(i, i);
        a(i, i) = Real(1);
        for (int j = 0; j <= l; ++j) a(j, i) = a(i, j) = Real(0);
    }
}

// Implicit-shift QL on a symmetric tridiagonal matrix (classic tql2
// structure); eigenvectors accumulate onto the columns of z.
template <class Real>
void tridiagonal_ql(std::vector<Real>& d, std::vector<Real>& e, Matrix<Real>& z,
                    bool want_vectors) {
    const int n = static_cast<int>(d.size());
    const Real eps = std::numeric_limits<Real>::epsilon();
    for (int i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = Real(0);

    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const Real dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd) break;
            }
            if (m != l) {
                if (iter++ == 50)
                    throw std::runtime_error("tridiagonal QL failed to converge");
                Real g = (d[l + 1] - d[l]) / (Real(2) * e[l]);
                Real r = std::hypot(g, Real(1));
                g = d[m] - d[l] + e[l] / (g + (g >= Real(0) ? std::abs(r) : -std::abs(r)));
                Real s(1), c(1), p(0);
                int i;
                for (i = m - 1; i >= l; --i) {
                    Real f = s * e[i];
                    const Real b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == Real(0)) {
                        d[i + 1] -= p;
                        e[m] = Real(0);
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + Real(2) * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    if (want_vectors) {
                        for (int k = 0; k < n; ++k) {
                            f = z(k, i + 1);
                            z(k, i + 1) = s * z(k, i) + c * f;
                            z(k, i) = c * z(k, i) - s * f;
                        }
                    }
                }
                if (r == Real(0) && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = Real(0);
            }
        } while (m != l);
    }
}

}  // namespace detail

// Full symmetric eigendecomposition. Cyclic Jacobi for small matrices,
// Householder + implicit-shift QL above 64 rows.
template <class Real>
SymEigResult<Real> sym_eig(const Matrix<Real>& a, bool want_vectors = true) {
    const int n = a.rows();
    if (n == 0) return {};
    if (n <= 64) return detail::jacobi_eig(a, want_vectors);

    Matrix<Real> z = a;
    std::vector<Real> d, e;
    detail::tridiagonalize(z, d, e);
    detail::tridiagonal_ql(d, e, z, want_vectors);
    SymEigResult<Real> r;
    r.values = std::move(d);
    if (want_vectors) r.vectors = std::move(z);
    detail::sort_eig_ascending(r.values, r.vectors, want_vectors);
    return r;
}

template <class Real>
Matrix<Real> kron(const Matrix<Real>& a, const Matrix<Real>& b) {
    Matrix<Real> c(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            const Real aij = a(i, j);
            if (aij == Real(0)) continue;
            for (int k = 0; k < b.rows(); ++k)
                for (int l = 0; l < b.cols(); ++l)
                    c(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    return c;
}

}  // namespace mixedspec
