/// Test-only reference implementations kept independent of the code under
/// test: dense multiplication, LU solve, a Jacobi eigensolver and simple RNG
/// helpers with fixed seeds.
#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "ibm/sparse.hpp"

namespace oracle {

using Dense = std::vector<std::vector<double>>;

inline Dense to_dense(const ibm::SparseMatrix& A) {
    Dense d(static_cast<size_t>(A.rows()), std::vector<double>(static_cast<size_t>(A.cols()), 0.0));
    for (int r = 0; r < A.rows(); ++r)
        for (int k = A.row_ptr()[static_cast<size_t>(r)]; k < A.row_ptr()[static_cast<size_t>(r) + 1]; ++k)
            d[static_cast<size_t>(r)][static_cast<size_t>(A.col_idx()[static_cast<size_t>(k)])] =
                A.values()[static_cast<size_t>(k)];
    return d;
}

inline Dense matmul(const Dense& a, const Dense& b) {
    const size_t n = a.size(), m = b[0].size(), k = b.size();
    Dense c(n, std::vector<double>(m, 0.0));
    for (size_t i = 0; i < n; ++i)
        for (size_t l = 0; l < k; ++l)
            for (size_t j = 0; j < m; ++j) c[i][j] += a[i][l] * b[l][j];
    return c;
}

/// Dense LU solve with partial pivoting.
inline std::vector<double> lu_solve(Dense a, std::vector<double> b) {
    const size_t n = a.size();
    std::vector<size_t> piv(n);
    for (size_t i = 0; i < n; ++i) piv[i] = i;
    for (size_t col = 0; col < n; ++col) {
        size_t best = col;
        for (size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[best][col])) best = r;
        std::swap(a[col], a[best]);
        std::swap(b[col], b[best]);
        if (a[col][col] == 0.0) throw std::runtime_error("oracle lu: singular");
        for (size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (size_t ri = n; ri-- > 0;) {
        double s = b[ri];
        for (size_t c = ri + 1; c < n; ++c) s -= a[ri][c] * x[c];
        x[ri] = s / a[ri][ri];
    }
    return x;
}

/// Eigenvalues of a symmetric matrix by the cyclic Jacobi rotation method.
inline std::vector<double> jacobi_eigenvalues(Dense a, int sweeps = 100) {
    const size_t n = a.size();
    for (int s = 0; s < sweeps; ++s) {
        double off = 0.0;
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
        if (off < 1e-28) break;
        for (size_t p = 0; p < n; ++p) {
            for (size_t q = p + 1; q < n; ++q) {
                if (std::fabs(a[p][q]) < 1e-300) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), sn = t * c;
                for (size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - sn * akq;
                    a[k][q] = sn * akp + c * akq;
                }
                for (size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - sn * aqk;
                    a[q][k] = sn * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (size_t i = 0; i < n; ++i) ev[i] = a[i][i];
    return ev;
}

inline ibm::SparseMatrix random_sparse(int rows, int cols, double fill, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> up(0.0, 1.0), uv(-1.0, 1.0);
    std::vector<ibm::Triplet> t;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            if (up(rng) < fill) t.push_back({r, c, uv(rng)});
    if (t.empty()) t.push_back({0, 0, 1.0});
    return ibm::SparseMatrix::from_triplets(rows, cols, std::move(t));
}

/// 2-D five-point Poisson matrix on an n-by-n unit-spaced grid (Dirichlet
/// elimination form: diagonal 4, neighbors -1).
inline ibm::SparseMatrix poisson5(int n) {
    std::vector<ibm::Triplet> t;
    auto id = [n](int i, int j) { return i + j * n; };
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            t.push_back({id(i, j), id(i, j), 4.0});
            if (i > 0) t.push_back({id(i, j), id(i - 1, j), -1.0});
            if (i < n - 1) t.push_back({id(i, j), id(i + 1, j), -1.0});
            if (j > 0) t.push_back({id(i, j), id(i, j - 1), -1.0});
            if (j < n - 1) t.push_back({id(i, j), id(i, j + 1), -1.0});
        }
    return ibm::SparseMatrix::from_triplets(n * n, n * n, std::move(t));
}

} // namespace oracle
