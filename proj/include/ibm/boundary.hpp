/// \file boundary.hpp
/// \brief Velocity boundary conditions: prescribed (Dirichlet) and convective
///        outflow edges, the stored boundary values, and the divergence
///        inhomogeneity bc2.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ibm/grid.hpp"

namespace ibm {

enum class BcKind { dirichlet, convective };

struct EdgeBc {
    BcKind kind = BcKind::dirichlet;
    double u = 0.0;
    double v = 0.0;
};

struct BcSpec {
    EdgeBc left, right, bottom, top;
    double u_inf = 1.0;   // convection speed of the outflow condition

    bool any_convective() const {
        return left.kind == BcKind::convective || right.kind == BcKind::convective ||
               bottom.kind == BcKind::convective || top.kind == BcKind::convective;
    }
};

/// Velocity values stored on the domain boundary. Normal components sit on the
/// boundary faces; tangential components are wall values used by the half-cell
/// stencils next to each wall.
struct BoundaryState {
    std::vector<double> left_u, right_u;     // ny values at (x0|x1, y_c[j])
    std::vector<double> left_v, right_v;     // ny-1 values at (x0|x1, y_f[j+1])
    std::vector<double> bottom_v, top_v;     // nx values at (x_c[i], y0|y1)
    std::vector<double> bottom_u, top_u;     // nx-1 values at (x_f[i+1], y0|y1)

    static BoundaryState initial(const StaggeredGrid& g, const BcSpec& bc) {
        BoundaryState s;
        auto fill_lr = [&](const EdgeBc& e, std::vector<double>& u, std::vector<double>& v) {
            const double uu = e.kind == BcKind::dirichlet ? e.u : bc.u_inf;
            const double vv = e.kind == BcKind::dirichlet ? e.v : 0.0;
            u.assign(static_cast<size_t>(g.ny), uu);
            v.assign(static_cast<size_t>(g.ny) - 1, vv);
        };
        auto fill_tb = [&](const EdgeBc& e, std::vector<double>& v, std::vector<double>& u) {
            const double uu = e.kind == BcKind::dirichlet ? e.u : bc.u_inf;
            const double vv = e.kind == BcKind::dirichlet ? e.v : 0.0;
            v.assign(static_cast<size_t>(g.nx), vv);
            u.assign(static_cast<size_t>(g.nx) - 1, uu);
        };
        fill_lr(bc.left, s.left_u, s.left_v);
        fill_lr(bc.right, s.right_u, s.right_v);
        fill_tb(bc.bottom, s.bottom_v, s.bottom_u);
        fill_tb(bc.top, s.top_v, s.top_u);
        return s;
    }
};

struct BcUpdateReport {
    double max_cfl = 0.0;      // of the convective updates; > 1 is flagged
    double mass_correction = 0.0;
};

namespace bdetail {

inline void convect(std::vector<double>& bvals, const double* interior, double c) {
    for (size_t i = 0; i < bvals.size(); ++i) bvals[i] -= c * (bvals[i] - interior[i]);
}

} // namespace bdetail

/// Advance the boundary values one step: Dirichlet edges reset to the
/// prescribed values, convective edges follow the first-order upwind update
/// u_b -= (u_inf dt / dx_edge)(u_b - u_interior). Normal components on
/// convective edges are then shifted uniformly so the global boundary flux
/// balances (the divergence constraint is otherwise incompatible).
inline BcUpdateReport apply_velocity_bcs(const StaggeredGrid& g, const BcSpec& bc,
                                         const std::vector<double>& q, BoundaryState& s,
                                         double dt) {
    BcUpdateReport rep;
    const int nx = g.nx, ny = g.ny;

    auto u_of = [&](int i_f, int j) { return q[static_cast<size_t>(g.u_id(i_f, j))] / g.dy[static_cast<size_t>(j)]; };
    auto v_of = [&](int i, int j_f) { return q[static_cast<size_t>(g.v_id(i, j_f))] / g.dx[static_cast<size_t>(i)]; };

    // Dirichlet edges
    auto reset_lr = [&](const EdgeBc& e, std::vector<double>& u, std::vector<double>& v) {
        if (e.kind != BcKind::dirichlet) return;
        std::fill(u.begin(), u.end(), e.u);
        std::fill(v.begin(), v.end(), e.v);
    };
    auto reset_tb = [&](const EdgeBc& e, std::vector<double>& v, std::vector<double>& u) {
        if (e.kind != BcKind::dirichlet) return;
        std::fill(v.begin(), v.end(), e.v);
        std::fill(u.begin(), u.end(), e.u);
    };
    reset_lr(bc.left, s.left_u, s.left_v);
    reset_lr(bc.right, s.right_u, s.right_v);
    reset_tb(bc.bottom, s.bottom_v, s.bottom_u);
    reset_tb(bc.top, s.top_v, s.top_u);

    // convective edges (upwind toward the nearest interior line)
    if (bc.right.kind == BcKind::convective) {
        const double c = bc.u_inf * dt / g.dx[static_cast<size_t>(nx) - 1];
        rep.max_cfl = std::max(rep.max_cfl, c);
        std::vector<double> ui(static_cast<size_t>(ny)), vi(static_cast<size_t>(ny) - 1);
        for (int j = 0; j < ny; ++j) ui[static_cast<size_t>(j)] = u_of(nx - 1, j);
        for (int jf = 1; jf < ny; ++jf) vi[static_cast<size_t>(jf) - 1] = v_of(nx - 1, jf);
        bdetail::convect(s.right_u, ui.data(), c);
        bdetail::convect(s.right_v, vi.data(), c);
    }
    if (bc.left.kind == BcKind::convective) {
        const double c = bc.u_inf * dt / g.dx[0];
        rep.max_cfl = std::max(rep.max_cfl, c);
        std::vector<double> ui(static_cast<size_t>(ny)), vi(static_cast<size_t>(ny) - 1);
        for (int j = 0; j < ny; ++j) ui[static_cast<size_t>(j)] = u_of(1, j);
        for (int jf = 1; jf < ny; ++jf) vi[static_cast<size_t>(jf) - 1] = v_of(0, jf);
        bdetail::convect(s.left_u, ui.data(), c);
        bdetail::convect(s.left_v, vi.data(), c);
    }
    if (bc.top.kind == BcKind::convective) {
        const double c = bc.u_inf * dt / g.dy[static_cast<size_t>(ny) - 1];
        rep.max_cfl = std::max(rep.max_cfl, c);
        std::vector<double> vi(static_cast<size_t>(nx)), ui(static_cast<size_t>(nx) - 1);
        for (int i = 0; i < nx; ++i) vi[static_cast<size_t>(i)] = v_of(i, ny - 1);
        for (int i_f = 1; i_f < nx; ++i_f) ui[static_cast<size_t>(i_f) - 1] = u_of(i_f, ny - 1);
        bdetail::convect(s.top_v, vi.data(), c);
        bdetail::convect(s.top_u, ui.data(), c);
    }
    if (bc.bottom.kind == BcKind::convective) {
        const double c = bc.u_inf * dt / g.dy[0];
        rep.max_cfl = std::max(rep.max_cfl, c);
        std::vector<double> vi(static_cast<size_t>(nx)), ui(static_cast<size_t>(nx) - 1);
        for (int i = 0; i < nx; ++i) vi[static_cast<size_t>(i)] = v_of(i, 1);
        for (int i_f = 1; i_f < nx; ++i_f) ui[static_cast<size_t>(i_f) - 1] = u_of(i_f, 0);
        bdetail::convect(s.bottom_v, vi.data(), c);
        bdetail::convect(s.bottom_u, ui.data(), c);
    }

    // global mass balance: net outward flux must vanish
    double net = 0.0, conv_len = 0.0;
    for (int j = 0; j < ny; ++j) {
        net += (s.right_u[static_cast<size_t>(j)] - s.left_u[static_cast<size_t>(j)]) * g.dy[static_cast<size_t>(j)];
    }
    for (int i = 0; i < nx; ++i) {
        net += (s.top_v[static_cast<size_t>(i)] - s.bottom_v[static_cast<size_t>(i)]) * g.dx[static_cast<size_t>(i)];
    }
    if (bc.left.kind == BcKind::convective) conv_len += g.domain.height();
    if (bc.right.kind == BcKind::convective) conv_len += g.domain.height();
    if (bc.top.kind == BcKind::convective) conv_len += g.domain.width();
    if (bc.bottom.kind == BcKind::convective) conv_len += g.domain.width();

    if (conv_len > 0.0) {
        const double corr = net / conv_len;
        rep.mass_correction = corr;
        if (bc.right.kind == BcKind::convective)
            for (double& u : s.right_u) u -= corr;
        if (bc.left.kind == BcKind::convective)
            for (double& u : s.left_u) u += corr;
        if (bc.top.kind == BcKind::convective)
            for (double& v : s.top_v) v -= corr;
        if (bc.bottom.kind == BcKind::convective)
            for (double& v : s.bottom_v) v += corr;
    } else if (std::fabs(net) > 1e-9 * std::max(1.0, g.domain.width() + g.domain.height())) {
        throw std::runtime_error("boundary: prescribed velocities have nonzero net flux and no convective edge to absorb it");
    }
    return rep;
}

/// Divergence-constraint inhomogeneity: D q = bc2 with boundary fluxes moved
/// to the right-hand side.
inline std::vector<double> make_bc2(const StaggeredGrid& g, const BoundaryState& s) {
    std::vector<double> bc2(static_cast<size_t>(g.n_p()), 0.0);
    for (int j = 0; j < g.ny; ++j) {
        bc2[static_cast<size_t>(g.p_id(0, j))] += s.left_u[static_cast<size_t>(j)] * g.dy[static_cast<size_t>(j)];
        bc2[static_cast<size_t>(g.p_id(g.nx - 1, j))] -= s.right_u[static_cast<size_t>(j)] * g.dy[static_cast<size_t>(j)];
    }
    for (int i = 0; i < g.nx; ++i) {
        bc2[static_cast<size_t>(g.p_id(i, 0))] += s.bottom_v[static_cast<size_t>(i)] * g.dx[static_cast<size_t>(i)];
        bc2[static_cast<size_t>(g.p_id(i, g.ny - 1))] -= s.top_v[static_cast<size_t>(i)] * g.dx[static_cast<size_t>(i)];
    }
    return bc2;
}

} // namespace ibm
