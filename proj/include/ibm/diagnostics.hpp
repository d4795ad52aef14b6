/// \file diagnostics.hpp
/// \brief Forces and coefficients, vorticity, Strouhal estimation, analytic
///        reference profiles and convergence-order fitting.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ibm/grid.hpp"
#include "ibm/stepper.hpp"

namespace ibm {

struct ForceRecord {
    double t = 0.0;
    double fx = 0.0, fy = 0.0;
    double cd = 0.0, cl = 0.0;
};

/// Total force on the body from the transformed boundary forces. With the
/// scaling used here (f_tilde absorbs the arc quadrature ds) this is a plain
/// sum per component; coefficients are normalized by rho/2 u_inf^2 L_ref with
/// rho = 1.
inline ForceRecord compute_force_coefficients(const std::vector<double>& f_tilde, int n_b,
                                              double t, double u_inf, double ref_length) {
    ForceRecord r;
    r.t = t;
    for (int k = 0; k < n_b; ++k) {
        r.fx += f_tilde[static_cast<size_t>(k)];
        r.fy += f_tilde[static_cast<size_t>(n_b + k)];
    }
    const double denom = 0.5 * u_inf * u_inf * ref_length;
    r.cd = r.fx / denom;
    r.cl = r.fy / denom;
    return r;
}

/// Vorticity omega = dv/dx - du/dy at the interior cell vertices
/// (x_f[i], y_f[j]), i in [1,nx-1], j in [1,ny-1]; row-major in j.
inline std::vector<double> compute_vorticity(const StaggeredGrid& g, const std::vector<double>& q) {
    std::vector<double> w(static_cast<size_t>(g.nx - 1) * static_cast<size_t>(g.ny - 1));
    for (int j = 1; j < g.ny; ++j) {
        for (int i = 1; i < g.nx; ++i) {
            const double dvdx = (q[static_cast<size_t>(g.v_id(i, j))] / g.dx[static_cast<size_t>(i)] -
                                 q[static_cast<size_t>(g.v_id(i - 1, j))] / g.dx[static_cast<size_t>(i) - 1]) /
                                g.del_x[static_cast<size_t>(i) - 1];
            const double dudy = (q[static_cast<size_t>(g.u_id(i, j))] / g.dy[static_cast<size_t>(j)] -
                                 q[static_cast<size_t>(g.u_id(i, j - 1))] / g.dy[static_cast<size_t>(j) - 1]) /
                                g.del_y[static_cast<size_t>(j) - 1];
            w[static_cast<size_t>(i - 1) + static_cast<size_t>(j - 1) * static_cast<size_t>(g.nx - 1)] = dvdx - dudy;
        }
    }
    return w;
}

/// Shedding frequency from mean zero-crossing spacing of the detrended lift
/// signal; St = f d / u_inf. Requires at least 3 detected periods.
inline double estimate_strouhal(const std::vector<double>& t, const std::vector<double>& cl,
                                double d, double u_inf) {
    if (t.size() != cl.size() || t.size() < 8)
        throw std::invalid_argument("strouhal: need a sampled lift series");
    double mean = 0.0;
    for (double v : cl) mean += v;
    mean /= static_cast<double>(cl.size());

    std::vector<double> crossings;   // upward crossings, linearly interpolated
    for (size_t i = 1; i < cl.size(); ++i) {
        const double a = cl[i - 1] - mean, b = cl[i] - mean;
        if (a < 0.0 && b >= 0.0) {
            const double frac = a / (a - b);
            crossings.push_back(t[i - 1] + frac * (t[i] - t[i - 1]));
        }
    }
    if (crossings.size() < 4)
        throw std::runtime_error("strouhal: fewer than 3 full periods detected");
    const double period = (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
    return d / (period * u_inf);
}

/// Steady Couette profile between concentric cylinders; solid-body rotation
/// inside the inner cylinder.
inline double couette_analytic(double r, double omega, double r_i, double r_o) {
    if (r > r_o * (1.0 + 1e-12)) throw std::invalid_argument("couette: r beyond the outer cylinder");
    if (r < r_i) return omega * r;
    return omega * r_i * (r_o / r - r / r_o) / (r_o / r_i - r_i / r_o);
}

/// Fitted order from (h, error) pairs: two levels give the log ratio, more
/// give the least-squares slope in log-log.
inline double convergence_order(const std::vector<std::pair<double, double>>& errors) {
    if (errors.size() < 2) throw std::invalid_argument("convergence_order: need at least 2 levels");
    for (const auto& [h, e] : errors)
        if (!(h > 0.0) || !(e > 0.0)) throw std::invalid_argument("convergence_order: nonpositive entries");
    if (errors.size() == 2)
        return std::log(errors[0].second / errors[1].second) / std::log(errors[0].first / errors[1].first);
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(errors.size());
    for (const auto& [h, e] : errors) {
        const double x = std::log(h), y = std::log(e);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---------------------------------------------------------------------------
// field sampling
// ---------------------------------------------------------------------------

namespace ddetail {

/// 1-D linear interpolation on an increasing coordinate array.
inline double interp1(const std::vector<double>& xs, const std::vector<double>& vs, double x) {
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    size_t i = static_cast<size_t>(std::clamp<long>(it - xs.begin() - 1, 0, static_cast<long>(xs.size()) - 2));
    const double w = (x - xs[i]) / (xs[i + 1] - xs[i]);
    return (1.0 - w) * vs[i] + w * vs[i + 1];
}

} // namespace ddetail

/// Bilinear velocity sample at (x, y) from the staggered fluxes, using the
/// boundary values at the walls.
inline void sample_velocity(const StaggeredGrid& g, const std::vector<double>& q,
                            const BoundaryState& s, double x, double y, double& u, double& v) {
    // u lives at (x_f[i_f], y_c[j]) plus wall columns/rows
    {
        std::vector<double> xs(static_cast<size_t>(g.nx) + 1);
        for (int i = 0; i <= g.nx; ++i) xs[static_cast<size_t>(i)] = g.x_faces[static_cast<size_t>(i)];
        auto u_at = [&](int i_f, int j) {
            if (i_f == 0) return s.left_u[static_cast<size_t>(j)];
            if (i_f == g.nx) return s.right_u[static_cast<size_t>(j)];
            return q[static_cast<size_t>(g.u_id(i_f, j))] / g.dy[static_cast<size_t>(j)];
        };
        // bracket y in the padded center array (walls included)
        std::vector<double> ys(static_cast<size_t>(g.ny) + 2);
        ys.front() = g.y_faces.front();
        for (int j = 0; j < g.ny; ++j) ys[static_cast<size_t>(j) + 1] = g.y_c[static_cast<size_t>(j)];
        ys.back() = g.y_faces.back();
        auto u_row = [&](int jr, int i_f) {   // jr indexes ys
            if (jr == 0) return i_f >= 1 && i_f <= g.nx - 1 ? s.bottom_u[static_cast<size_t>(i_f) - 1]
                                                            : u_at(i_f, 0);
            if (jr == g.ny + 1) return i_f >= 1 && i_f <= g.nx - 1 ? s.top_u[static_cast<size_t>(i_f) - 1]
                                                                   : u_at(i_f, g.ny - 1);
            return u_at(i_f, jr - 1);
        };
        auto ix = std::upper_bound(xs.begin(), xs.end(), x);
        int i0 = static_cast<int>(std::clamp<long>(ix - xs.begin() - 1, 0, static_cast<long>(xs.size()) - 2));
        auto iy = std::upper_bound(ys.begin(), ys.end(), y);
        int j0 = static_cast<int>(std::clamp<long>(iy - ys.begin() - 1, 0, static_cast<long>(ys.size()) - 2));
        const double wx = (x - xs[static_cast<size_t>(i0)]) / (xs[static_cast<size_t>(i0) + 1] - xs[static_cast<size_t>(i0)]);
        const double wy = (y - ys[static_cast<size_t>(j0)]) / (ys[static_cast<size_t>(j0) + 1] - ys[static_cast<size_t>(j0)]);
        u = (1.0 - wx) * ((1.0 - wy) * u_row(j0, i0) + wy * u_row(j0 + 1, i0)) +
            wx * ((1.0 - wy) * u_row(j0, i0 + 1) + wy * u_row(j0 + 1, i0 + 1));
    }
    // v mirrors u with the axes swapped
    {
        std::vector<double> ys(static_cast<size_t>(g.ny) + 1);
        for (int j = 0; j <= g.ny; ++j) ys[static_cast<size_t>(j)] = g.y_faces[static_cast<size_t>(j)];
        auto v_at = [&](int i, int j_f) {
            if (j_f == 0) return s.bottom_v[static_cast<size_t>(i)];
            if (j_f == g.ny) return s.top_v[static_cast<size_t>(i)];
            return q[static_cast<size_t>(g.v_id(i, j_f))] / g.dx[static_cast<size_t>(i)];
        };
        std::vector<double> xs(static_cast<size_t>(g.nx) + 2);
        xs.front() = g.x_faces.front();
        for (int i = 0; i < g.nx; ++i) xs[static_cast<size_t>(i) + 1] = g.x_c[static_cast<size_t>(i)];
        xs.back() = g.x_faces.back();
        auto v_col = [&](int ir, int j_f) {
            if (ir == 0) return j_f >= 1 && j_f <= g.ny - 1 ? s.left_v[static_cast<size_t>(j_f) - 1]
                                                            : v_at(0, j_f);
            if (ir == g.nx + 1) return j_f >= 1 && j_f <= g.ny - 1 ? s.right_v[static_cast<size_t>(j_f) - 1]
                                                                   : v_at(g.nx - 1, j_f);
            return v_at(ir - 1, j_f);
        };
        auto iy = std::upper_bound(ys.begin(), ys.end(), y);
        int j0 = static_cast<int>(std::clamp<long>(iy - ys.begin() - 1, 0, static_cast<long>(ys.size()) - 2));
        auto ix = std::upper_bound(xs.begin(), xs.end(), x);
        int i0 = static_cast<int>(std::clamp<long>(ix - xs.begin() - 1, 0, static_cast<long>(xs.size()) - 2));
        const double wy = (y - ys[static_cast<size_t>(j0)]) / (ys[static_cast<size_t>(j0) + 1] - ys[static_cast<size_t>(j0)]);
        const double wx = (x - xs[static_cast<size_t>(i0)]) / (xs[static_cast<size_t>(i0) + 1] - xs[static_cast<size_t>(i0)]);
        v = (1.0 - wy) * ((1.0 - wx) * v_col(i0, j0) + wx * v_col(i0 + 1, j0)) +
            wy * ((1.0 - wx) * v_col(i0, j0 + 1) + wx * v_col(i0 + 1, j0 + 1));
    }
}

struct CouetteErrors {
    double l2_rel = 0.0;
    double linf_rel = 0.0;
    std::vector<double> r, num, ana;
};

/// Azimuthal velocity sampled along a radial ray between the cylinders,
/// compared with the analytic steady profile. Points within `exclude` of
/// either cylinder are skipped (the delta-smeared layer is O(h) thick).
inline CouetteErrors couette_profile_error(const StaggeredGrid& g, const std::vector<double>& q,
                                           const BoundaryState& s, double omega, double r_i,
                                           double r_o, double exclude, int n_samples = 100,
                                           double ray_angle = 0.5235987755982988) {
    CouetteErrors ce;
    const double a = r_i + exclude, b = r_o - exclude;
    if (b <= a) throw std::invalid_argument("couette: exclusion leaves no sample window");
    double num2 = 0.0, ana2 = 0.0, linf = 0.0, amax = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        const double r = a + (b - a) * (i + 0.5) / n_samples;
        const double x = r * std::cos(ray_angle), y = r * std::sin(ray_angle);
        double u, v;
        sample_velocity(g, q, s, x, y, u, v);
        const double utheta = -u * std::sin(ray_angle) + v * std::cos(ray_angle);
        const double exact = couette_analytic(r, omega, r_i, r_o);
        ce.r.push_back(r);
        ce.num.push_back(utheta);
        ce.ana.push_back(exact);
        num2 += (utheta - exact) * (utheta - exact);
        ana2 += exact * exact;
        linf = std::max(linf, std::fabs(utheta - exact));
        amax = std::max(amax, std::fabs(exact));
    }
    ce.l2_rel = std::sqrt(num2 / ana2);
    ce.linf_rel = linf / amax;
    return ce;
}

} // namespace ibm
