/// \file sparse.hpp
/// \brief Compressed-row sparse matrices and the kernels the solver is built on:
///        matrix-vector product, matrix-matrix product and a row-sliced triple product.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace ibm {

struct Triplet {
    int row;
    int col;
    double value;
};

/// General sparse matrix, finalized to compressed-row storage.
/// Column indices are strictly increasing within each row; duplicate triplets
/// are summed during finalization and exact zeros from the input are dropped.
class SparseMatrix {
public:
    SparseMatrix() = default;

    SparseMatrix(int rows, int cols, std::vector<int> row_ptr,
                 std::vector<int> col_idx, std::vector<double> values)
        : rows_(rows), cols_(cols),
          rptr_(std::move(row_ptr)), cidx_(std::move(col_idx)), val_(std::move(values)) {}

    static SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet> t) {
        for (const auto& e : t) {
            if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols)
                throw std::invalid_argument("sparse: triplet index out of range");
        }
        std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        });
        SparseMatrix m;
        m.rows_ = rows;
        m.cols_ = cols;
        m.rptr_.assign(static_cast<size_t>(rows) + 1, 0);
        m.cidx_.reserve(t.size());
        m.val_.reserve(t.size());
        size_t k = 0;
        for (int r = 0; r < rows; ++r) {
            while (k < t.size() && t[k].row == r) {
                int c = t[k].col;
                double v = 0.0;
                while (k < t.size() && t[k].row == r && t[k].col == c) {
                    v += t[k].value;
                    ++k;
                }
                if (v != 0.0) {
                    m.cidx_.push_back(c);
                    m.val_.push_back(v);
                }
            }
            m.rptr_[static_cast<size_t>(r) + 1] = static_cast<int>(m.cidx_.size());
        }
        return m;
    }

    static SparseMatrix identity(int n) {
        std::vector<Triplet> t;
        t.reserve(n);
        for (int i = 0; i < n; ++i) t.push_back({i, i, 1.0});
        return from_triplets(n, n, std::move(t));
    }

    static SparseMatrix diagonal(const std::vector<double>& d) {
        std::vector<Triplet> t;
        t.reserve(d.size());
        for (int i = 0; i < static_cast<int>(d.size()); ++i) t.push_back({i, i, d[static_cast<size_t>(i)]});
        return from_triplets(static_cast<int>(d.size()), static_cast<int>(d.size()), std::move(t));
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int nnz() const { return static_cast<int>(cidx_.size()); }

    const std::vector<int>& row_ptr() const { return rptr_; }
    const std::vector<int>& col_idx() const { return cidx_; }
    const std::vector<double>& values() const { return val_; }
    std::vector<double>& values() { return val_; }

    /// Entry lookup by binary search; zero when not stored.
    double operator()(int i, int j) const {
        const int* b = cidx_.data() + rptr_[static_cast<size_t>(i)];
        const int* e = cidx_.data() + rptr_[static_cast<size_t>(i) + 1];
        const int* p = std::lower_bound(b, e, j);
        if (p != e && *p == j) return val_[static_cast<size_t>(p - cidx_.data())];
        return 0.0;
    }

    void spmv_into(const double* x, double* y) const {
        const int n = rows_;
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int k = rptr_[static_cast<size_t>(i)]; k < rptr_[static_cast<size_t>(i) + 1]; ++k)
                s += val_[static_cast<size_t>(k)] * x[cidx_[static_cast<size_t>(k)]];
            y[i] = s;
        }
    }

    std::vector<double> spmv(const std::vector<double>& x) const {
        if (static_cast<int>(x.size()) != cols_)
            throw std::invalid_argument("spmv: dimension mismatch");
        std::vector<double> y(static_cast<size_t>(rows_));
        spmv_into(x.data(), y.data());
        return y;
    }

    SparseMatrix transpose() const {
        SparseMatrix t;
        t.rows_ = cols_;
        t.cols_ = rows_;
        t.rptr_.assign(static_cast<size_t>(cols_) + 1, 0);
        t.cidx_.resize(cidx_.size());
        t.val_.resize(val_.size());
        for (int c : cidx_) ++t.rptr_[static_cast<size_t>(c) + 1];
        for (int c = 0; c < cols_; ++c) t.rptr_[static_cast<size_t>(c) + 1] += t.rptr_[static_cast<size_t>(c)];
        std::vector<int> next(t.rptr_.begin(), t.rptr_.end() - 1);
        for (int r = 0; r < rows_; ++r) {
            for (int k = rptr_[static_cast<size_t>(r)]; k < rptr_[static_cast<size_t>(r) + 1]; ++k) {
                int pos = next[static_cast<size_t>(cidx_[static_cast<size_t>(k)])]++;
                t.cidx_[static_cast<size_t>(pos)] = r;
                t.val_[static_cast<size_t>(pos)] = val_[static_cast<size_t>(k)];
            }
        }
        return t;
    }

    /// this := unmodified; returns a*this (entrywise scale).
    SparseMatrix scaled(double a) const {
        SparseMatrix m = *this;
        for (double& v : m.val_) v *= a;
        return m;
    }

    /// Returns this with row i scaled by d[i].
    SparseMatrix scaled_rows(const std::vector<double>& d) const {
        SparseMatrix m = *this;
        for (int r = 0; r < rows_; ++r)
            for (int k = rptr_[static_cast<size_t>(r)]; k < rptr_[static_cast<size_t>(r) + 1]; ++k)
                m.val_[static_cast<size_t>(k)] *= d[static_cast<size_t>(r)];
        return m;
    }

    /// Returns this with column j scaled by d[j].
    SparseMatrix scaled_cols(const std::vector<double>& d) const {
        SparseMatrix m = *this;
        for (size_t k = 0; k < m.val_.size(); ++k) m.val_[k] *= d[static_cast<size_t>(cidx_[k])];
        return m;
    }

    std::vector<double> diagonal_vector() const {
        std::vector<double> d(static_cast<size_t>(std::min(rows_, cols_)), 0.0);
        for (int i = 0; i < static_cast<int>(d.size()); ++i) d[static_cast<size_t>(i)] = (*this)(i, i);
        return d;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : val_) m = std::max(m, std::fabs(v));
        return m;
    }

    /// Max absolute row sum.
    double inf_norm() const {
        double m = 0.0;
        for (int r = 0; r < rows_; ++r) {
            double s = 0.0;
            for (int k = rptr_[static_cast<size_t>(r)]; k < rptr_[static_cast<size_t>(r) + 1]; ++k)
                s += std::fabs(val_[static_cast<size_t>(k)]);
            m = std::max(m, s);
        }
        return m;
    }

    /// Coordinate text dump: "n_rows n_cols nnz" header then "row col value"
    /// lines, 0-based, %.17g.
    void dump(const std::string& path) const {
        std::FILE* f = std::fopen(path.c_str(), "w");
        if (!f) throw std::runtime_error("cannot open " + path);
        std::fprintf(f, "%d %d %d\n", rows_, cols_, nnz());
        for (int r = 0; r < rows_; ++r)
            for (int k = rptr_[static_cast<size_t>(r)]; k < rptr_[static_cast<size_t>(r) + 1]; ++k)
                std::fprintf(f, "%d %d %.17g\n", r, cidx_[static_cast<size_t>(k)], val_[static_cast<size_t>(k)]);
        std::fclose(f);
    }

    static SparseMatrix load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open " + path);
        int rows, cols, nnz;
        if (!(in >> rows >> cols >> nnz)) throw std::runtime_error("bad matrix header in " + path);
        std::vector<Triplet> t;
        t.reserve(static_cast<size_t>(nnz));
        for (int k = 0; k < nnz; ++k) {
            Triplet e{};
            if (!(in >> e.row >> e.col >> e.value)) throw std::runtime_error("truncated matrix file " + path);
            t.push_back(e);
        }
        return from_triplets(rows, cols, std::move(t));
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<int> rptr_{0};
    std::vector<int> cidx_;
    std::vector<double> val_;

    friend SparseMatrix spmm_rows(const SparseMatrix&, int, int, const SparseMatrix&);
};

/// C[i-r0,:] = A[i,:]*B for i in [r0, r1). Gustavson accumulation; structural
/// (cancelled) entries are retained, no drop tolerance.
inline SparseMatrix spmm_rows(const SparseMatrix& A, int r0, int r1, const SparseMatrix& B) {
    if (A.cols() != B.rows()) throw std::invalid_argument("spmm: dimension mismatch");
    const int out_rows = r1 - r0;
    SparseMatrix C;
    C.rows_ = out_rows;
    C.cols_ = B.cols();
    C.rptr_.assign(static_cast<size_t>(out_rows) + 1, 0);

    std::vector<double> acc(static_cast<size_t>(B.cols()), 0.0);
    std::vector<int> marker(static_cast<size_t>(B.cols()), -1);
    std::vector<int> touched;

    const auto& arp = A.row_ptr();
    const auto& aci = A.col_idx();
    const auto& av = A.values();
    const auto& brp = B.row_ptr();
    const auto& bci = B.col_idx();
    const auto& bv = B.values();

    for (int i = r0; i < r1; ++i) {
        touched.clear();
        for (int ka = arp[static_cast<size_t>(i)]; ka < arp[static_cast<size_t>(i) + 1]; ++ka) {
            const int j = aci[static_cast<size_t>(ka)];
            const double a = av[static_cast<size_t>(ka)];
            for (int kb = brp[static_cast<size_t>(j)]; kb < brp[static_cast<size_t>(j) + 1]; ++kb) {
                const int c = bci[static_cast<size_t>(kb)];
                if (marker[static_cast<size_t>(c)] != i) {
                    marker[static_cast<size_t>(c)] = i;
                    acc[static_cast<size_t>(c)] = 0.0;
                    touched.push_back(c);
                }
                acc[static_cast<size_t>(c)] += a * bv[static_cast<size_t>(kb)];
            }
        }
        std::sort(touched.begin(), touched.end());
        for (int c : touched) {
            C.cidx_.push_back(c);
            C.val_.push_back(acc[static_cast<size_t>(c)]);
        }
        C.rptr_[static_cast<size_t>(i - r0) + 1] = static_cast<int>(C.cidx_.size());
    }
    return C;
}

inline SparseMatrix spmm(const SparseMatrix& A, const SparseMatrix& B) {
    return spmm_rows(A, 0, A.rows(), B);
}

struct TripleProductStats {
    size_t peak_slice_nnz = 0;   ///< largest intermediate A[slice,:]*B held at once
    int slices = 0;
};

/// D = A*B*C computed over row blocks of A of at most max_slice_rows rows.
/// Each intermediate slice A[slice,:]*B is discarded after it is multiplied by
/// C, so the full A*B product is never stored.
inline SparseMatrix sliced_triple_product(const SparseMatrix& A, const SparseMatrix& B,
                                          const SparseMatrix& C, int max_slice_rows,
                                          TripleProductStats* stats = nullptr) {
    if (A.cols() != B.rows() || B.cols() != C.rows())
        throw std::invalid_argument("sliced_triple_product: dimension mismatch");
    if (max_slice_rows < 1) throw std::invalid_argument("sliced_triple_product: slice size must be >= 1");

    std::vector<int> rptr(1, 0);
    std::vector<int> cidx;
    std::vector<double> val;
    TripleProductStats st;

    for (int r0 = 0; r0 < A.rows(); r0 += max_slice_rows) {
        const int r1 = std::min(A.rows(), r0 + max_slice_rows);
        SparseMatrix temp_slice = spmm_rows(A, r0, r1, B);
        st.peak_slice_nnz = std::max(st.peak_slice_nnz, static_cast<size_t>(temp_slice.nnz()));
        ++st.slices;
        SparseMatrix d_slice = spmm(temp_slice, C);
        const auto& rp = d_slice.row_ptr();
        const auto& ci = d_slice.col_idx();
        const auto& v = d_slice.values();
        for (int r = 0; r < d_slice.rows(); ++r) {
            for (int k = rp[static_cast<size_t>(r)]; k < rp[static_cast<size_t>(r) + 1]; ++k) {
                cidx.push_back(ci[static_cast<size_t>(k)]);
                val.push_back(v[static_cast<size_t>(k)]);
            }
            rptr.push_back(static_cast<int>(cidx.size()));
        }
    }
    if (stats) *stats = st;
    if (A.rows() == 0) return SparseMatrix(0, C.cols(), {0}, {}, {});
    return SparseMatrix(A.rows(), C.cols(), std::move(rptr), std::move(cidx), std::move(val));
}

/// a*A + b*B with matching dimensions; unions the patterns.
inline SparseMatrix add_sparse(double a, const SparseMatrix& A, double b, const SparseMatrix& B) {
    if (A.rows() != B.rows() || A.cols() != B.cols())
        throw std::invalid_argument("add_sparse: dimension mismatch");
    std::vector<Triplet> t;
    t.reserve(static_cast<size_t>(A.nnz() + B.nnz()));
    for (int r = 0; r < A.rows(); ++r)
        for (int k = A.row_ptr()[static_cast<size_t>(r)]; k < A.row_ptr()[static_cast<size_t>(r) + 1]; ++k)
            t.push_back({r, A.col_idx()[static_cast<size_t>(k)], a * A.values()[static_cast<size_t>(k)]});
    for (int r = 0; r < B.rows(); ++r)
        for (int k = B.row_ptr()[static_cast<size_t>(r)]; k < B.row_ptr()[static_cast<size_t>(r) + 1]; ++k)
            t.push_back({r, B.col_idx()[static_cast<size_t>(k)], b * B.values()[static_cast<size_t>(k)]});
    return SparseMatrix::from_triplets(A.rows(), A.cols(), std::move(t));
}

inline bool is_symmetric(const SparseMatrix& A, double tol) {
    if (A.rows() != A.cols()) return false;
    SparseMatrix At = A.transpose();
    double scale = std::max(A.max_abs(), 1e-300);
    for (int r = 0; r < A.rows(); ++r) {
        int ka = A.row_ptr()[static_cast<size_t>(r)], ea = A.row_ptr()[static_cast<size_t>(r) + 1];
        int kb = At.row_ptr()[static_cast<size_t>(r)], eb = At.row_ptr()[static_cast<size_t>(r) + 1];
        while (ka < ea || kb < eb) {
            int ca = ka < ea ? A.col_idx()[static_cast<size_t>(ka)] : A.cols();
            int cb = kb < eb ? At.col_idx()[static_cast<size_t>(kb)] : A.cols();
            double va = 0.0, vb = 0.0;
            if (ca <= cb) va = A.values()[static_cast<size_t>(ka++)];
            if (cb <= ca) vb = At.values()[static_cast<size_t>(kb++)];
            if (std::fabs(va - vb) > tol * scale) return false;
        }
    }
    return true;
}

/// (A + A^T)/2, used to remove last-bit asymmetry from assembled products.
inline SparseMatrix symmetrized(const SparseMatrix& A) {
    return add_sparse(0.5, A, 0.5, A.transpose());
}

// ---- small dense vector helpers shared by the solvers ----

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

inline void axpy(double a, const std::vector<double>& x, std::vector<double>& y) {
    for (size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline double norm_inf(const std::vector<double>& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::fabs(v));
    return m;
}

} // namespace ibm
