/// \file dense.hpp
/// \brief Minimal dense Cholesky used for the coarsest multigrid level.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ibm/sparse.hpp"

namespace ibm {

class DenseCholesky {
public:
    DenseCholesky() = default;

    /// Factor a (small) SPD sparse matrix. A tiny diagonal shift is applied on
    /// a nonpositive pivot so a semi-definite coarse operator still yields a
    /// usable solve.
    explicit DenseCholesky(const SparseMatrix& A) {
        n_ = A.rows();
        if (A.cols() != n_) throw std::invalid_argument("cholesky: square matrix required");
        l_.assign(static_cast<size_t>(n_) * static_cast<size_t>(n_), 0.0);
        for (int r = 0; r < n_; ++r)
            for (int k = A.row_ptr()[static_cast<size_t>(r)]; k < A.row_ptr()[static_cast<size_t>(r) + 1]; ++k)
                l_[idx(r, A.col_idx()[static_cast<size_t>(k)])] = A.values()[static_cast<size_t>(k)];
        const double shift = 1e-13 * std::max(A.max_abs(), 1.0);
        for (int j = 0; j < n_; ++j) {
            double d = l_[idx(j, j)];
            for (int k = 0; k < j; ++k) d -= l_[idx(j, k)] * l_[idx(j, k)];
            if (d <= 0.0) d = shift;
            d = std::sqrt(d);
            l_[idx(j, j)] = d;
            for (int i = j + 1; i < n_; ++i) {
                double s = l_[idx(i, j)];
                for (int k = 0; k < j; ++k) s -= l_[idx(i, k)] * l_[idx(j, k)];
                l_[idx(i, j)] = s / d;
            }
        }
    }

    int size() const { return n_; }

    void solve(const double* b, double* x) const {
        std::vector<double> y(static_cast<size_t>(n_));
        for (int i = 0; i < n_; ++i) {
            double s = b[i];
            for (int k = 0; k < i; ++k) s -= l_[idx(i, k)] * y[static_cast<size_t>(k)];
            y[static_cast<size_t>(i)] = s / l_[idx(i, i)];
        }
        for (int i = n_ - 1; i >= 0; --i) {
            double s = y[static_cast<size_t>(i)];
            for (int k = i + 1; k < n_; ++k) s -= l_[idx(k, i)] * x[k];
            x[i] = s / l_[idx(i, i)];
        }
    }

private:
    size_t idx(int i, int j) const { return static_cast<size_t>(i) * static_cast<size_t>(n_) + static_cast<size_t>(j); }
    int n_ = 0;
    std::vector<double> l_;
};

} // namespace ibm
