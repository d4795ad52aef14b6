/// \file operators.hpp
/// \brief Assembly of the discrete operators: metric matrices M, diffusion L,
///        gradient G (with D = -G^T by construction), interpolation E,
///        regularization H, implicit operator A, its truncated-series inverse
///        B^N, the combined Q = [G E^T] and the pinned coupled matrix Q^T B^N Q.
///
/// Everything acts on momentum fluxes q (velocity times transverse cell
/// width); the per-equation scaling that symmetrizes the system is baked into
/// the assembled entries.
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "ibm/body.hpp"
#include "ibm/boundary.hpp"
#include "ibm/grid.hpp"
#include "ibm/sparse.hpp"

namespace ibm {

/// One boundary-value coupling of the diffusion stencil: row of the velocity
/// system, which boundary array, index into it, and the (velocity-valued)
/// coefficient. Used to build bc1 at evaluation time.
struct BcCoupling {
    enum Slot { LU, RU, LV, RV, BV, TV, BU, TU };
    int row;
    Slot slot;
    int idx;
    double coeff;
};

inline double bc_coupling_value(const BoundaryState& s, const BcCoupling& c) {
    switch (c.slot) {
        case BcCoupling::LU: return s.left_u[static_cast<size_t>(c.idx)];
        case BcCoupling::RU: return s.right_u[static_cast<size_t>(c.idx)];
        case BcCoupling::LV: return s.left_v[static_cast<size_t>(c.idx)];
        case BcCoupling::RV: return s.right_v[static_cast<size_t>(c.idx)];
        case BcCoupling::BV: return s.bottom_v[static_cast<size_t>(c.idx)];
        case BcCoupling::TV: return s.top_v[static_cast<size_t>(c.idx)];
        case BcCoupling::BU: return s.bottom_u[static_cast<size_t>(c.idx)];
        case BcCoupling::TU: return s.top_u[static_cast<size_t>(c.idx)];
    }
    return 0.0;
}

struct OperatorSet {
    double dt = 0.0;
    double nu = 0.0;
    int n_order = 1;
    int n_b = 0;                  // total Lagrangian points over all bodies
    int pin_index = 0;
    int slice_rows = 0;           // 0 = full height in the triple product

    std::vector<double> M, Minv;  // diagonal metric (cell-width ratios)
    SparseMatrix L;               // diffusion on q, symmetric
    SparseMatrix G;               // gradient, n_q x n_p; divergence is -G^T
    SparseMatrix E;               // interpolation, 2n_b x n_q (gives velocities)
    SparseMatrix H;               // force spreading to velocity nodes (diagnostics)
    SparseMatrix A;               // M/dt - (nu/2) L
    SparseMatrix BN;              // truncated Neumann series for A^{-1}
    SparseMatrix Q, QT;           // [G E^T] and its transpose
    SparseMatrix lhs2;            // pinned Q^T B^N Q
    std::vector<BcCoupling> visc_bc;

    int n_lambda() const { return G.cols() + 2 * n_b; }
};

// ---------------------------------------------------------------------------
// metric
// ---------------------------------------------------------------------------

inline std::vector<double> assemble_metric(const StaggeredGrid& g) {
    std::vector<double> m(static_cast<size_t>(g.n_q()));
    for (int j = 0; j < g.ny; ++j)
        for (int i_f = 1; i_f < g.nx; ++i_f)
            m[static_cast<size_t>(g.u_id(i_f, j))] = g.del_x[static_cast<size_t>(i_f) - 1] / g.dy[static_cast<size_t>(j)];
    for (int j_f = 1; j_f < g.ny; ++j_f)
        for (int i = 0; i < g.nx; ++i)
            m[static_cast<size_t>(g.v_id(i, j_f))] = g.del_y[static_cast<size_t>(j_f) - 1] / g.dx[static_cast<size_t>(i)];
    return m;
}

// ---------------------------------------------------------------------------
// diffusion
// ---------------------------------------------------------------------------

/// Central-difference (flux form) Laplacian of each velocity component on the
/// staggered grid, scaled to act on q. Boundary couplings are returned
/// separately so bc1 can be evaluated with time-dependent boundary values.
/// Tangential neighbors across a wall use the half-cell spacing to the wall.
inline SparseMatrix assemble_diffusion(const StaggeredGrid& g, std::vector<BcCoupling>& bc) {
    bc.clear();
    std::vector<Triplet> t;
    const int nx = g.nx, ny = g.ny;
    t.reserve(static_cast<size_t>(g.n_q()) * 5);

    // u-component rows
    for (int j = 0; j < ny; ++j) {
        for (int i_f = 1; i_f < nx; ++i_f) {
            const int row = g.u_id(i_f, j);
            const double sm = g.del_x[static_cast<size_t>(i_f) - 1];
            const double dyj = g.dy[static_cast<size_t>(j)];
            double diag_hat = 0.0;   // sum of unscaled stencil weights, units 1/length^2

            // west / east neighbors are u values separated by the cell widths
            {
                const double w_hat = 1.0 / (sm * g.dx[static_cast<size_t>(i_f) - 1]);
                diag_hat += w_hat;
                if (i_f - 1 >= 1)
                    t.push_back({row, g.u_id(i_f - 1, j), 1.0 / (dyj * g.dx[static_cast<size_t>(i_f) - 1])});
                else
                    bc.push_back({row, BcCoupling::LU, j, sm * w_hat});
            }
            {
                const double w_hat = 1.0 / (sm * g.dx[static_cast<size_t>(i_f)]);
                diag_hat += w_hat;
                if (i_f + 1 <= nx - 1)
                    t.push_back({row, g.u_id(i_f + 1, j), 1.0 / (dyj * g.dx[static_cast<size_t>(i_f)])});
                else
                    bc.push_back({row, BcCoupling::RU, j, sm * w_hat});
            }
            // south / north; wall neighbors sit half a cell away
            {
                const double span = j > 0 ? g.del_y[static_cast<size_t>(j) - 1] : 0.5 * dyj;
                const double w_hat = 1.0 / (dyj * span);
                diag_hat += w_hat;
                if (j > 0)
                    t.push_back({row, g.u_id(i_f, j - 1), sm / (span * (dyj * g.dy[static_cast<size_t>(j) - 1]))});
                else
                    bc.push_back({row, BcCoupling::BU, i_f - 1, sm * w_hat});
            }
            {
                const double span = j < ny - 1 ? g.del_y[static_cast<size_t>(j)] : 0.5 * dyj;
                const double w_hat = 1.0 / (dyj * span);
                diag_hat += w_hat;
                if (j < ny - 1)
                    t.push_back({row, g.u_id(i_f, j + 1), sm / (span * (dyj * g.dy[static_cast<size_t>(j) + 1]))});
                else
                    bc.push_back({row, BcCoupling::TU, i_f - 1, sm * w_hat});
            }
            t.push_back({row, row, -sm * diag_hat / dyj});
        }
    }

    // v-component rows
    for (int j_f = 1; j_f < ny; ++j_f) {
        for (int i = 0; i < nx; ++i) {
            const int row = g.v_id(i, j_f);
            const double sm = g.del_y[static_cast<size_t>(j_f) - 1];
            const double dxi = g.dx[static_cast<size_t>(i)];
            double diag_hat = 0.0;

            {
                const double w_hat = 1.0 / (sm * g.dy[static_cast<size_t>(j_f) - 1]);
                diag_hat += w_hat;
                if (j_f - 1 >= 1)
                    t.push_back({row, g.v_id(i, j_f - 1), 1.0 / (dxi * g.dy[static_cast<size_t>(j_f) - 1])});
                else
                    bc.push_back({row, BcCoupling::BV, i, sm * w_hat});
            }
            {
                const double w_hat = 1.0 / (sm * g.dy[static_cast<size_t>(j_f)]);
                diag_hat += w_hat;
                if (j_f + 1 <= ny - 1)
                    t.push_back({row, g.v_id(i, j_f + 1), 1.0 / (dxi * g.dy[static_cast<size_t>(j_f)])});
                else
                    bc.push_back({row, BcCoupling::TV, i, sm * w_hat});
            }
            {
                const double span = i > 0 ? g.del_x[static_cast<size_t>(i) - 1] : 0.5 * dxi;
                const double w_hat = 1.0 / (dxi * span);
                diag_hat += w_hat;
                if (i > 0)
                    t.push_back({row, g.v_id(i - 1, j_f), sm / (span * (dxi * g.dx[static_cast<size_t>(i) - 1]))});
                else
                    bc.push_back({row, BcCoupling::LV, j_f - 1, sm * w_hat});
            }
            {
                const double span = i < nx - 1 ? g.del_x[static_cast<size_t>(i)] : 0.5 * dxi;
                const double w_hat = 1.0 / (dxi * span);
                diag_hat += w_hat;
                if (i < nx - 1)
                    t.push_back({row, g.v_id(i + 1, j_f), sm / (span * (dxi * g.dx[static_cast<size_t>(i) + 1]))});
                else
                    bc.push_back({row, BcCoupling::RV, j_f - 1, sm * w_hat});
            }
            t.push_back({row, row, -sm * diag_hat / dxi});
        }
    }
    return SparseMatrix::from_triplets(g.n_q(), g.n_q(), std::move(t));
}

/// Viscous boundary inhomogeneity for the current boundary values (already in
/// the scaled q-equation units).
inline std::vector<double> viscous_bc_vector(const OperatorSet& ops, const BoundaryState& s, int n_q) {
    std::vector<double> b(static_cast<size_t>(n_q), 0.0);
    for (const auto& c : ops.visc_bc) b[static_cast<size_t>(c.row)] += c.coeff * bc_coupling_value(s, c);
    return b;
}

// ---------------------------------------------------------------------------
// gradient / divergence
// ---------------------------------------------------------------------------

/// G maps cell pressures to the scaled momentum equations with entries +-1;
/// the divergence is exactly -G^T (net cell flux of q).
inline SparseMatrix assemble_gradient(const StaggeredGrid& g) {
    std::vector<Triplet> t;
    t.reserve(static_cast<size_t>(g.n_q()) * 2);
    for (int j = 0; j < g.ny; ++j)
        for (int i_f = 1; i_f < g.nx; ++i_f) {
            const int row = g.u_id(i_f, j);
            t.push_back({row, g.p_id(i_f - 1, j), -1.0});
            t.push_back({row, g.p_id(i_f, j), 1.0});
        }
    for (int j_f = 1; j_f < g.ny; ++j_f)
        for (int i = 0; i < g.nx; ++i) {
            const int row = g.v_id(i, j_f);
            t.push_back({row, g.p_id(i, j_f - 1), -1.0});
            t.push_back({row, g.p_id(i, j_f), 1.0});
        }
    return SparseMatrix::from_triplets(g.n_q(), g.n_p(), std::move(t));
}

inline SparseMatrix make_divergence(const SparseMatrix& G) { return G.transpose().scaled(-1.0); }

// ---------------------------------------------------------------------------
// interpolation / regularization
// ---------------------------------------------------------------------------

namespace odetail {

/// Indices of staggered nodes whose coordinate lies strictly inside the delta
/// support around xi.
inline void support_range(const std::vector<double>& coords, int lo, int hi,
                          double xi, double rad, int& first, int& last) {
    first = hi + 1;
    last = hi;
    for (int i = lo; i <= hi; ++i) {
        const double d = coords[static_cast<size_t>(i)] - xi;
        if (d > -rad && d < rad) {
            if (i < first) first = i;
            last = i;
        }
    }
}

inline void check_support(const StaggeredGrid& g, double px, double py) {
    const double rad = 1.5 * g.h_min;
    if (!g.uniform_region.contains_point(px, py, rad * (1.0 - 1e-9)))
        throw std::runtime_error("body point (" + std::to_string(px) + ", " + std::to_string(py) +
                                 ") too close to the edge of the uniform grid region; delta support would "
                                 "extend onto stretched cells");
}

} // namespace odetail

/// Interpolation E: row k of the u block samples the velocity at body point k
/// with weights del_x * d(x - xi) d(y - eta) over at most 3x3 u-nodes (the
/// transverse-width scaling that converts q to velocity is already folded in).
inline SparseMatrix assemble_interpolation(const StaggeredGrid& g,
                                           const std::vector<LagrangianBody>& bodies) {
    int n_b = 0;
    for (const auto& b : bodies) n_b += b.n();
    std::vector<Triplet> t;
    const double h = g.h_min;
    const double rad = 1.5 * h;

    int k = 0;
    for (const auto& body : bodies) {
        for (int p = 0; p < body.n(); ++p, ++k) {
            const double px = body.x[static_cast<size_t>(p)], py = body.y[static_cast<size_t>(p)];
            odetail::check_support(g, px, py);

            int i0, i1, j0, j1;
            // u-nodes: (x_f[i_f], y_c[j])
            odetail::support_range(g.x_faces, 1, g.nx - 1, px, rad, i0, i1);
            odetail::support_range(g.y_c, 0, g.ny - 1, py, rad, j0, j1);
            for (int j = j0; j <= j1; ++j)
                for (int i_f = i0; i_f <= i1; ++i_f) {
                    const double w = g.del_x[static_cast<size_t>(i_f) - 1] *
                                     delta_roma(g.x_faces[static_cast<size_t>(i_f)] - px, h) *
                                     delta_roma(g.y_c[static_cast<size_t>(j)] - py, h);
                    if (w != 0.0) t.push_back({k, g.u_id(i_f, j), w});
                }
            // v-nodes: (x_c[i], y_f[j_f])
            odetail::support_range(g.x_c, 0, g.nx - 1, px, rad, i0, i1);
            odetail::support_range(g.y_faces, 1, g.ny - 1, py, rad, j0, j1);
            for (int j_f = j0; j_f <= j1; ++j_f)
                for (int i = i0; i <= i1; ++i) {
                    const double w = g.del_y[static_cast<size_t>(j_f) - 1] *
                                     delta_roma(g.x_c[static_cast<size_t>(i)] - px, h) *
                                     delta_roma(g.y_faces[static_cast<size_t>(j_f)] - py, h);
                    if (w != 0.0) t.push_back({n_b + k, g.v_id(i, j_f), w});
                }
        }
    }
    return SparseMatrix::from_triplets(2 * n_b, g.n_q(), std::move(t));
}

/// Regularization H: spreads point forces to velocity nodes with the delta
/// weights and the arc quadrature ds. Retained for diagnostics and the
/// untransformed formulation; the coupled system uses E^T directly.
inline SparseMatrix assemble_regularization(const StaggeredGrid& g,
                                            const std::vector<LagrangianBody>& bodies) {
    int n_b = 0;
    for (const auto& b : bodies) n_b += b.n();
    std::vector<Triplet> t;
    const double h = g.h_min;
    const double rad = 1.5 * h;

    int k = 0;
    for (const auto& body : bodies) {
        for (int p = 0; p < body.n(); ++p, ++k) {
            const double px = body.x[static_cast<size_t>(p)], py = body.y[static_cast<size_t>(p)];
            odetail::check_support(g, px, py);
            int i0, i1, j0, j1;
            odetail::support_range(g.x_faces, 1, g.nx - 1, px, rad, i0, i1);
            odetail::support_range(g.y_c, 0, g.ny - 1, py, rad, j0, j1);
            for (int j = j0; j <= j1; ++j)
                for (int i_f = i0; i_f <= i1; ++i_f) {
                    const double w = body.ds *
                                     delta_roma(g.x_faces[static_cast<size_t>(i_f)] - px, h) *
                                     delta_roma(g.y_c[static_cast<size_t>(j)] - py, h);
                    if (w != 0.0) t.push_back({g.u_id(i_f, j), k, w});
                }
            odetail::support_range(g.x_c, 0, g.nx - 1, px, rad, i0, i1);
            odetail::support_range(g.y_faces, 1, g.ny - 1, py, rad, j0, j1);
            for (int j_f = j0; j_f <= j1; ++j_f)
                for (int i = i0; i <= i1; ++i) {
                    const double w = body.ds *
                                     delta_roma(g.x_c[static_cast<size_t>(i)] - px, h) *
                                     delta_roma(g.y_faces[static_cast<size_t>(j_f)] - py, h);
                    if (w != 0.0) t.push_back({g.v_id(i, j_f), n_b + k, w});
                }
        }
    }
    return SparseMatrix::from_triplets(g.n_q(), 2 * n_b, std::move(t));
}

// ---------------------------------------------------------------------------
// implicit operator and approximate inverse
// ---------------------------------------------------------------------------

/// A = M/dt - (nu/2) L (Crank-Nicolson implicit half) and the N-term series
/// B^N = dt M^{-1} sum_{j<N} ((nu dt/2) L M^{-1})^j.
inline void assemble_A_BN(const std::vector<double>& M, const SparseMatrix& L, double dt,
                          double nu, int n_order, SparseMatrix& A, SparseMatrix& BN) {
    if (dt <= 0.0) throw std::invalid_argument("operators: dt must be positive");
    if (n_order < 1 || n_order > 3) throw std::invalid_argument("operators: B^N order must be 1, 2 or 3");

    std::vector<double> m_dt(M.size()), minv(M.size());
    for (size_t i = 0; i < M.size(); ++i) {
        m_dt[i] = M[i] / dt;
        minv[i] = 1.0 / M[i];
    }
    A = add_sparse(1.0, SparseMatrix::diagonal(m_dt), -0.5 * nu, L);

    if (n_order == 1) {
        std::vector<double> d(M.size());
        for (size_t i = 0; i < M.size(); ++i) d[i] = dt * minv[i];
        BN = SparseMatrix::diagonal(d);
        return;
    }
    const SparseMatrix X = L.scaled_cols(minv).scaled(0.5 * nu * dt);
    SparseMatrix series = add_sparse(1.0, SparseMatrix::identity(static_cast<int>(M.size())), 1.0, X);
    if (n_order == 3) series = add_sparse(1.0, series, 1.0, spmm(X, X));
    std::vector<double> row_scale(M.size());
    for (size_t i = 0; i < M.size(); ++i) row_scale[i] = dt * minv[i];
    BN = series.scaled_rows(row_scale);
}

// ---------------------------------------------------------------------------
// coupled system
// ---------------------------------------------------------------------------

/// Replace row and column pin of a square matrix with the identity row/column.
inline SparseMatrix pin_row_col(const SparseMatrix& A, int pin) {
    std::vector<Triplet> t;
    t.reserve(static_cast<size_t>(A.nnz()) + 1);
    for (int r = 0; r < A.rows(); ++r)
        for (int k = A.row_ptr()[static_cast<size_t>(r)]; k < A.row_ptr()[static_cast<size_t>(r) + 1]; ++k) {
            const int c = A.col_idx()[static_cast<size_t>(k)];
            if (r == pin || c == pin) continue;
            t.push_back({r, c, A.values()[static_cast<size_t>(k)]});
        }
    t.push_back({pin, pin, 1.0});
    return SparseMatrix::from_triplets(A.rows(), A.cols(), std::move(t));
}

inline SparseMatrix concat_cols(const SparseMatrix& G, const SparseMatrix& Et) {
    std::vector<Triplet> t;
    t.reserve(static_cast<size_t>(G.nnz() + Et.nnz()));
    for (int r = 0; r < G.rows(); ++r)
        for (int k = G.row_ptr()[static_cast<size_t>(r)]; k < G.row_ptr()[static_cast<size_t>(r) + 1]; ++k)
            t.push_back({r, G.col_idx()[static_cast<size_t>(k)], G.values()[static_cast<size_t>(k)]});
    for (int r = 0; r < Et.rows(); ++r)
        for (int k = Et.row_ptr()[static_cast<size_t>(r)]; k < Et.row_ptr()[static_cast<size_t>(r) + 1]; ++k)
            t.push_back({r, G.cols() + Et.col_idx()[static_cast<size_t>(k)], Et.values()[static_cast<size_t>(k)]});
    return SparseMatrix::from_triplets(G.rows(), G.cols() + Et.cols(), std::move(t));
}

/// Q = [G E^T], its transpose, and the pinned coupled matrix
/// lhs2 = Q^T B^N Q (symmetrized to the last bit, then pinned).
inline void assemble_coupled_system(const SparseMatrix& G, const SparseMatrix& E,
                                    const SparseMatrix& BN, int pin, int slice_rows,
                                    SparseMatrix& Q, SparseMatrix& QT, SparseMatrix& lhs2,
                                    TripleProductStats* stats = nullptr) {
    Q = concat_cols(G, E.transpose());
    QT = Q.transpose();
    const int slice = slice_rows > 0 ? slice_rows : QT.rows();
    SparseMatrix raw = sliced_triple_product(QT, BN, Q, slice, stats);
    lhs2 = pin_row_col(symmetrized(raw), pin);
}

/// Full assembly for a grid/body configuration.
inline OperatorSet assemble_operators(const StaggeredGrid& g, const std::vector<LagrangianBody>& bodies,
                                      double dt, double nu, int n_order, int pin_index = 0,
                                      int slice_rows = 0) {
    OperatorSet ops;
    ops.dt = dt;
    ops.nu = nu;
    ops.n_order = n_order;
    ops.pin_index = pin_index;
    ops.slice_rows = slice_rows;
    ops.n_b = 0;
    for (const auto& b : bodies) ops.n_b += b.n();

    ops.M = assemble_metric(g);
    ops.Minv.resize(ops.M.size());
    for (size_t i = 0; i < ops.M.size(); ++i) ops.Minv[i] = 1.0 / ops.M[i];
    ops.L = assemble_diffusion(g, ops.visc_bc);
    ops.G = assemble_gradient(g);
    ops.E = assemble_interpolation(g, bodies);
    ops.H = assemble_regularization(g, bodies);
    assemble_A_BN(ops.M, ops.L, dt, nu, n_order, ops.A, ops.BN);
    assemble_coupled_system(ops.G, ops.E, ops.BN, pin_index, slice_rows, ops.Q, ops.QT, ops.lhs2);
    return ops;
}

/// Body positions changed: rebuild only what depends on them.
inline void refresh_body_operators(OperatorSet& ops, const StaggeredGrid& g,
                                   const std::vector<LagrangianBody>& bodies) {
    ops.E = assemble_interpolation(g, bodies);
    ops.H = assemble_regularization(g, bodies);
    assemble_coupled_system(ops.G, ops.E, ops.BN, ops.pin_index, ops.slice_rows, ops.Q, ops.QT, ops.lhs2);
}

/// Prescribed body velocities stacked to match the rows of E.
inline std::vector<double> body_velocity_vector(const std::vector<LagrangianBody>& bodies) {
    int n_b = 0;
    for (const auto& b : bodies) n_b += b.n();
    std::vector<double> ub(static_cast<size_t>(2 * n_b));
    int k = 0;
    for (const auto& b : bodies) {
        for (int p = 0; p < b.n(); ++p, ++k) {
            ub[static_cast<size_t>(k)] = b.ub_x[static_cast<size_t>(p)];
            ub[static_cast<size_t>(n_b + k)] = b.ub_y[static_cast<size_t>(p)];
        }
    }
    return ub;
}

} // namespace ibm
