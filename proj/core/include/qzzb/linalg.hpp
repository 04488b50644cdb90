#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace qzzb {

// Minimal dense matrices for the small (dimension <= a few hundred) problems
// this library deals with.  Row-major storage.

template <typename T>
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<T> a;

    DenseMatrix() = default;
    DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, T{}) {}

    T& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
        return m;
    }

    bool square() const { return rows == cols; }
};

using MatD = DenseMatrix<double>;
using MatC = DenseMatrix<std::complex<double>>;

template <typename T>
DenseMatrix<T> matmul(const DenseMatrix<T>& x, const DenseMatrix<T>& y) {
    if (x.cols != y.rows) throw std::invalid_argument("matmul: shape mismatch");
    DenseMatrix<T> z(x.rows, y.cols);
    for (std::size_t i = 0; i < x.rows; ++i) {
        for (std::size_t k = 0; k < x.cols; ++k) {
            const T xik = x(i, k);
            if (xik == T{}) continue;
            for (std::size_t j = 0; j < y.cols; ++j) z(i, j) += xik * y(k, j);
        }
    }
    return z;
}

inline MatD transpose(const MatD& m) {
    MatD t(m.cols, m.rows);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) t(j, i) = m(i, j);
    return t;
}

inline MatC adjoint(const MatC& m) {
    MatC t(m.cols, m.rows);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) t(j, i) = std::conj(m(i, j));
    return t;
}

template <typename T>
double max_abs_diff(const DenseMatrix<T>& x, const DenseMatrix<T>& y) {
    if (x.rows != y.rows || x.cols != y.cols)
        throw std::invalid_argument("max_abs_diff: shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < x.a.size(); ++i) m = std::max(m, std::abs(x.a[i] - y.a[i]));
    return m;
}

// Maximum absolute column sum (induced 1-norm).
template <typename T>
double one_norm(const DenseMatrix<T>& m) {
    double best = 0.0;
    for (std::size_t j = 0; j < m.cols; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m.rows; ++i) s += std::abs(m(i, j));
        best = std::max(best, s);
    }
    return best;
}

} // namespace qzzb
