#ifndef PURSUIT_DETAIL_SMALL_MATRIX_HPP_INCLUDED
#define PURSUIT_DETAIL_SMALL_MATRIX_HPP_INCLUDED

// Dense row-major matrices of a handful of rows; Gaussian elimination only.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace pursuit::detail {

struct SmallMatrix {
    std::size_t n = 0;
    std::vector<double> a;  // n*n, row-major

    explicit SmallMatrix(std::size_t n_ = 0) : n(n_), a(n_ * n_, 0.0) {}
    double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

// LU with partial pivoting; returns the determinant and overwrites `m`
inline double lu_in_place(SmallMatrix& m, std::vector<std::size_t>& perm)
{
    std::size_t const n = m.n;
    perm.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        perm[i] = i;
    double det = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(m(r, c)) > std::abs(m(piv, c)))
                piv = r;
        if (m(piv, c) == 0.0)
            return 0.0;
        if (piv != c) {
            for (std::size_t j = 0; j < n; ++j)
                std::swap(m(c, j), m(piv, j));
            std::swap(perm[c], perm[piv]);
            det = -det;
        }
        det *= m(c, c);
        for (std::size_t r = c + 1; r < n; ++r) {
            double const f = m(r, c) / m(c, c);
            m(r, c) = f;
            for (std::size_t j = c + 1; j < n; ++j)
                m(r, j) -= f * m(c, j);
        }
    }
    return det;
}

inline double determinant(SmallMatrix m)
{
    std::vector<std::size_t> perm;
    return lu_in_place(m, perm);
}

inline std::vector<double> solve(SmallMatrix m, std::vector<double> const& rhs)
{
    std::vector<std::size_t> perm;
    if (lu_in_place(m, perm) == 0.0)
        throw std::domain_error("solve: singular matrix");
    std::size_t const n = m.n;
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = rhs[perm[i]];
        for (std::size_t j = 0; j < i; ++j)
            s -= m(i, j) * x[j];
        x[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = x[i];
        for (std::size_t j = i + 1; j < n; ++j)
            s -= m(i, j) * x[j];
        x[i] = s / m(i, i);
    }
    return x;
}

inline SmallMatrix inverse(SmallMatrix const& m)
{
    SmallMatrix inv(m.n);
    for (std::size_t j = 0; j < m.n; ++j) {
        std::vector<double> e(m.n, 0.0);
        e[j] = 1.0;
        auto const col = solve(m, e);
        for (std::size_t i = 0; i < m.n; ++i)
            inv(i, j) = col[i];
    }
    return inv;
}

}  // namespace pursuit::detail

#endif  // PURSUIT_DETAIL_SMALL_MATRIX_HPP_INCLUDED
