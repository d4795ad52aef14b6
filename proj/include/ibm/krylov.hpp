/// \file krylov.hpp
/// \brief Conjugate gradient with pluggable preconditioning.
#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "ibm/sparse.hpp"

namespace ibm {

struct SolverParams {
    double rel_tol = 1e-5;
    int max_iters = 2000;
    bool record_history = false;
    bool check_symmetry = false;   // on demand: max|A - A^T| <= 1e-12 max|A|

    void validate() const {
        if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw std::invalid_argument("solver: rel_tol must be in (0,1)");
        if (max_iters < 1) throw std::invalid_argument("solver: max_iters must be >= 1");
    }
};

enum class SolveStatus { converged, max_iterations, breakdown };

struct SolveResult {
    std::vector<double> x;
    int iterations = 0;
    double rel_residual = 0.0;
    SolveStatus status = SolveStatus::converged;
    std::vector<double> history;   // relative residual per iteration when recorded

    bool converged() const { return status == SolveStatus::converged; }
};

/// Application interface for preconditioners: z = M^{-1} r.
class Preconditioner {
public:
    virtual ~Preconditioner() = default;
    virtual void apply(const std::vector<double>& r, std::vector<double>& z) const = 0;
};

class IdentityPreconditioner final : public Preconditioner {
public:
    void apply(const std::vector<double>& r, std::vector<double>& z) const override { z = r; }
};

class DiagonalPreconditioner final : public Preconditioner {
public:
    explicit DiagonalPreconditioner(const SparseMatrix& A) : inv_diag_(A.diagonal_vector()) {
        for (double& d : inv_diag_) {
            if (d == 0.0) throw std::invalid_argument("diagonal preconditioner: zero diagonal entry");
            d = 1.0 / d;
        }
    }
    void apply(const std::vector<double>& r, std::vector<double>& z) const override {
        z.resize(r.size());
        for (size_t i = 0; i < r.size(); ++i) z[i] = r[i] * inv_diag_[i];
    }

private:
    std::vector<double> inv_diag_;
};

/// Preconditioned conjugate gradient. Converged means ||b - Ax||_2 / ||b||_2
/// <= rel_tol. A zero right-hand side returns x = 0 immediately.
inline SolveResult pcg(const SparseMatrix& A, const std::vector<double>& b,
                       const std::vector<double>& x0, const Preconditioner& M,
                       const SolverParams& params) {
    params.validate();
    if (A.rows() != A.cols() || static_cast<int>(b.size()) != A.rows())
        throw std::invalid_argument("pcg: dimension mismatch");
    if (params.check_symmetry && !is_symmetric(A, 1e-12))
        throw std::invalid_argument("pcg: matrix is not symmetric");

    const size_t n = b.size();
    SolveResult res;
    res.x = x0.empty() ? std::vector<double>(n, 0.0) : x0;
    if (res.x.size() != n) throw std::invalid_argument("pcg: bad initial guess size");

    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        res.x.assign(n, 0.0);
        res.status = SolveStatus::converged;
        return res;
    }

    std::vector<double> r(n), z(n), p(n), Ap(n);
    A.spmv_into(res.x.data(), r.data());
    for (size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];

    double rel = norm2(r) / bnorm;
    if (params.record_history) res.history.push_back(rel);
    if (rel <= params.rel_tol) {
        res.rel_residual = rel;
        return res;
    }

    M.apply(r, z);
    p = z;
    double rz = dot(r, z);

    for (int it = 1; it <= params.max_iters; ++it) {
        A.spmv_into(p.data(), Ap.data());
        const double pAp = dot(p, Ap);
        if (pAp <= 0.0) {
            res.iterations = it - 1;
            res.rel_residual = rel;
            res.status = SolveStatus::breakdown;
            return res;
        }
        const double alpha = rz / pAp;
        axpy(alpha, p, res.x);
        axpy(-alpha, Ap, r);
        rel = norm2(r) / bnorm;
        if (params.record_history) res.history.push_back(rel);
        if (rel <= params.rel_tol) {
            res.iterations = it;
            res.rel_residual = rel;
            res.status = SolveStatus::converged;
            return res;
        }
        M.apply(r, z);
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    res.iterations = params.max_iters;
    res.rel_residual = rel;
    res.status = SolveStatus::max_iterations;
    return res;
}

inline SolveResult cg(const SparseMatrix& A, const std::vector<double>& b,
                      const std::vector<double>& x0, const SolverParams& params) {
    return pcg(A, b, x0, IdentityPreconditioner{}, params);
}

} // namespace ibm
