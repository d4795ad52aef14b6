/// \file amg.hpp
/// \brief Smoothed-aggregation algebraic multigrid, used as a symmetric
///        V-cycle preconditioner with an optional reuse policy across time steps.
///
/// Construction follows the standard smoothed-aggregation recipe: strength
/// graph by |A_ij| >= theta*sqrt(A_ii A_jj), greedy aggregation, tentative
/// prolongator of one constant column per aggregate, damped-Jacobi prolongator
/// smoothing, Galerkin coarse operators, dense Cholesky on the coarsest level.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ibm/dense.hpp"
#include "ibm/krylov.hpp"
#include "ibm/sparse.hpp"

namespace ibm {

struct SaOptions {
    double theta = 0.25;        // strength-of-connection threshold
    int max_coarse = 64;        // stop coarsening at this size
    int max_levels = 25;
    int power_iterations = 10;  // spectral-radius estimate for the Jacobi damping
    // trailing rows kept as unsmoothed singleton aggregates on every level.
    // The coupled matrix ends in boundary-force rows whose dense-ish coupling
    // wrecks aggregation quality; carrying them to the coarsest level intact
    // roughly halves the preconditioned iteration count.
    int keep_fine_tail = 0;
};

struct SaLevel {
    SparseMatrix A;
    SparseMatrix P;             // prolongator to this level from the next coarser
    SparseMatrix Pt;
    std::vector<double> inv_diag;
    double omega = 0.0;         // damped-Jacobi weight, 4/3 over the spectral-radius estimate
};

struct SaHierarchy {
    std::vector<SaLevel> levels;   // levels[l].P maps level l+1 -> level l
    SparseMatrix coarse_A;
    DenseCholesky coarse_solver;
    int built_at_step = -1;        // time-step index of construction, for the reuse policy
    bool coarsening_stalled = false;

    int finest_size() const {
        return levels.empty() ? coarse_A.rows() : levels.front().A.rows();
    }
    size_t level_count() const { return levels.size() + 1; }
};

namespace sa_detail {

/// Spectral-radius estimate of D^{-1}A by fixed-count power iteration with a
/// deterministic start vector.
inline double rho_dinv_a(const SparseMatrix& A, const std::vector<double>& inv_diag, int iters) {
    const size_t n = static_cast<size_t>(A.rows());
    std::vector<double> v(n), w(n);
    uint64_t s = 0x9e3779b97f4a7c15ull;
    for (size_t i = 0; i < n; ++i) {
        s = s * 6364136223846793005ull + 1442695040888963407ull;
        v[i] = 0.5 + static_cast<double>(s >> 11) / static_cast<double>(1ull << 53);
    }
    double lambda = 1.0;
    for (int it = 0; it < iters; ++it) {
        A.spmv_into(v.data(), w.data());
        for (size_t i = 0; i < n; ++i) w[i] *= inv_diag[i];
        lambda = norm2(w);
        if (lambda == 0.0) return 1.0;
        for (size_t i = 0; i < n; ++i) v[i] = w[i] / lambda;
    }
    return lambda;
}

/// Greedy aggregation over the strength graph. Returns the aggregate id per
/// node and the aggregate count; all-singleton output means no coarsening.
inline int aggregate(const SparseMatrix& S, std::vector<int>& agg) {
    const int n = S.rows();
    agg.assign(static_cast<size_t>(n), -1);
    int count = 0;
    // pass 1: seed aggregates from nodes whose strong neighborhood is untouched
    for (int i = 0; i < n; ++i) {
        if (agg[static_cast<size_t>(i)] != -1) continue;
        bool free_nbhd = true;
        for (int k = S.row_ptr()[static_cast<size_t>(i)]; k < S.row_ptr()[static_cast<size_t>(i) + 1]; ++k)
            if (agg[static_cast<size_t>(S.col_idx()[static_cast<size_t>(k)])] != -1) { free_nbhd = false; break; }
        if (!free_nbhd) continue;
        agg[static_cast<size_t>(i)] = count;
        for (int k = S.row_ptr()[static_cast<size_t>(i)]; k < S.row_ptr()[static_cast<size_t>(i) + 1]; ++k)
            agg[static_cast<size_t>(S.col_idx()[static_cast<size_t>(k)])] = count;
        ++count;
    }
    // pass 2: attach leftovers to a strongly connected aggregate
    for (int i = 0; i < n; ++i) {
        if (agg[static_cast<size_t>(i)] != -1) continue;
        for (int k = S.row_ptr()[static_cast<size_t>(i)]; k < S.row_ptr()[static_cast<size_t>(i) + 1]; ++k) {
            const int j = S.col_idx()[static_cast<size_t>(k)];
            if (agg[static_cast<size_t>(j)] != -1) { agg[static_cast<size_t>(i)] = agg[static_cast<size_t>(j)]; break; }
        }
    }
    // pass 3: isolated nodes become singletons
    for (int i = 0; i < n; ++i)
        if (agg[static_cast<size_t>(i)] == -1) agg[static_cast<size_t>(i)] = count++;
    return count;
}

/// Strength graph over the first n_core rows/columns; tail rows stay isolated.
inline SparseMatrix strength_graph(const SparseMatrix& A, double theta, int n_core) {
    const std::vector<double> diag = A.diagonal_vector();
    std::vector<Triplet> t;
    for (int i = 0; i < n_core; ++i) {
        for (int k = A.row_ptr()[static_cast<size_t>(i)]; k < A.row_ptr()[static_cast<size_t>(i) + 1]; ++k) {
            const int j = A.col_idx()[static_cast<size_t>(k)];
            if (j == i || j >= n_core) continue;
            const double bound = theta * std::sqrt(std::fabs(diag[static_cast<size_t>(i)] * diag[static_cast<size_t>(j)]));
            if (std::fabs(A.values()[static_cast<size_t>(k)]) >= bound && bound > 0.0)
                t.push_back({i, j, 1.0});
        }
    }
    return SparseMatrix::from_triplets(n_core, n_core, std::move(t));
}

} // namespace sa_detail

inline SaHierarchy build_sa_hierarchy(const SparseMatrix& A_fine, const SaOptions& opts = {}) {
    if (A_fine.rows() != A_fine.cols()) throw std::invalid_argument("sa: square matrix required");
    SaHierarchy h;
    SparseMatrix A = A_fine;
    const int tail = std::min(opts.keep_fine_tail, A_fine.rows());
    for (int lev = 0; lev < opts.max_levels && A.rows() > opts.max_coarse + tail; ++lev) {
        // strength threshold decays on coarse levels (Galerkin operators have
        // progressively flatter connection profiles)
        const double theta_l = opts.theta * std::pow(0.5, lev);
        const int n_core = A.rows() - tail;
        SparseMatrix S = sa_detail::strength_graph(A, theta_l, n_core);
        std::vector<int> agg;
        const int n_agg = sa_detail::aggregate(S, agg);
        if (n_agg >= n_core) {
            h.coarsening_stalled = true;   // all singletons: factor this level directly
            break;
        }

        std::vector<double> inv_diag = A.diagonal_vector();
        for (double& d : inv_diag) {
            if (d == 0.0) throw std::invalid_argument("sa: zero diagonal");
            d = 1.0 / d;
        }
        const double rho = sa_detail::rho_dinv_a(A, inv_diag, opts.power_iterations);
        const double omega = (4.0 / 3.0) / rho;

        // tentative prolongator: the normalized constant vector per aggregate
        std::vector<int> agg_size(static_cast<size_t>(n_agg), 0);
        for (int a : agg) ++agg_size[static_cast<size_t>(a)];
        std::vector<Triplet> pt;
        pt.reserve(static_cast<size_t>(n_core));
        for (int i = 0; i < n_core; ++i)
            pt.push_back({i, agg[static_cast<size_t>(i)],
                          1.0 / std::sqrt(static_cast<double>(agg_size[static_cast<size_t>(agg[static_cast<size_t>(i)])]))});
        SparseMatrix P_tent = SparseMatrix::from_triplets(A.rows(), n_agg, std::move(pt));

        // P = (I - omega D^{-1} A) P_tent on the core; tail rows prolongate
        // by identity into their own appended coarse unknowns
        SparseMatrix DA = A.scaled_rows(inv_diag);
        SparseMatrix P_core = add_sparse(1.0, P_tent, -omega, spmm(DA, P_tent));
        SparseMatrix P;
        if (tail > 0) {
            std::vector<Triplet> pfull;
            pfull.reserve(static_cast<size_t>(P_core.nnz() + tail));
            for (int r = 0; r < n_core; ++r)
                for (int k = P_core.row_ptr()[static_cast<size_t>(r)]; k < P_core.row_ptr()[static_cast<size_t>(r) + 1]; ++k)
                    pfull.push_back({r, P_core.col_idx()[static_cast<size_t>(k)], P_core.values()[static_cast<size_t>(k)]});
            for (int t2 = 0; t2 < tail; ++t2) pfull.push_back({n_core + t2, n_agg + t2, 1.0});
            P = SparseMatrix::from_triplets(A.rows(), n_agg + tail, std::move(pfull));
        } else {
            P = std::move(P_core);
        }

        SaLevel level;
        level.A = std::move(A);
        level.P = std::move(P);
        level.Pt = level.P.transpose();
        level.inv_diag = std::move(inv_diag);
        level.omega = omega;

        // Galerkin coarse operator via the same sliced product the solver uses
        A = sliced_triple_product(level.Pt, level.A, level.P, std::max(1, level.Pt.rows()));
        h.levels.push_back(std::move(level));
    }
    h.coarse_A = A;
    h.coarse_solver = DenseCholesky(h.coarse_A);
    return h;
}

namespace sa_detail {

inline void v_cycle(const SaHierarchy& h, size_t lev, const std::vector<double>& b,
                    std::vector<double>& x) {
    if (lev == h.levels.size()) {
        x.resize(b.size());
        h.coarse_solver.solve(b.data(), x.data());
        return;
    }
    const SaLevel& L = h.levels[lev];
    const size_t n = b.size();
    x.assign(n, 0.0);

    // pre-smooth (damped Jacobi from zero): x = omega D^{-1} b
    for (size_t i = 0; i < n; ++i) x[i] = L.omega * L.inv_diag[i] * b[i];

    std::vector<double> r(n);
    L.A.spmv_into(x.data(), r.data());
    for (size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];

    std::vector<double> rc = L.Pt.spmv(r);
    std::vector<double> ec;
    v_cycle(h, lev + 1, rc, ec);
    std::vector<double> corr = L.P.spmv(ec);
    for (size_t i = 0; i < n; ++i) x[i] += corr[i];

    // post-smooth
    L.A.spmv_into(x.data(), r.data());
    for (size_t i = 0; i < n; ++i) x[i] += L.omega * L.inv_diag[i] * (b[i] - r[i]);
}

} // namespace sa_detail

/// One V(1,1) cycle applied to residual r. Linear and self-adjoint, so it is a
/// valid SPD preconditioner for CG.
inline std::vector<double> sa_apply(const SaHierarchy& h, const std::vector<double>& r) {
    std::vector<double> z;
    sa_detail::v_cycle(h, 0, r, z);
    return z;
}

class SaPreconditioner final : public Preconditioner {
public:
    explicit SaPreconditioner(const SaHierarchy& h) : h_(&h) {}
    void apply(const std::vector<double>& r, std::vector<double>& z) const override {
        z = sa_apply(*h_, r);
    }

private:
    const SaHierarchy* h_;
};

/// Standalone multigrid solve: iterate V-cycles on the residual to the same
/// convergence contract as cg/pcg.
inline SolveResult amg_solve(const SparseMatrix& A, const SaHierarchy& h,
                             const std::vector<double>& b, const std::vector<double>& x0,
                             const SolverParams& params) {
    params.validate();
    const size_t n = b.size();
    SolveResult res;
    res.x = x0.empty() ? std::vector<double>(n, 0.0) : x0;
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        res.x.assign(n, 0.0);
        return res;
    }
    std::vector<double> r(n);
    for (int it = 0; it <= params.max_iters; ++it) {
        A.spmv_into(res.x.data(), r.data());
        for (size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
        const double rel = norm2(r) / bnorm;
        if (params.record_history) res.history.push_back(rel);
        res.rel_residual = rel;
        res.iterations = it;
        if (rel <= params.rel_tol) {
            res.status = SolveStatus::converged;
            return res;
        }
        if (it == params.max_iters) break;
        std::vector<double> z = sa_apply(h, r);
        axpy(1.0, z, res.x);
    }
    res.status = SolveStatus::max_iterations;
    return res;
}

} // namespace ibm
