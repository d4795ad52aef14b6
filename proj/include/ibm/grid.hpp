/// \file grid.hpp
/// \brief Staggered Cartesian grid with a uniform near-body region and
///        geometrically stretched outer cells.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace ibm {

struct Rect {
    double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    bool contains(const Rect& r) const {
        return r.x0 >= x0 - 1e-12 && r.x1 <= x1 + 1e-12 && r.y0 >= y0 - 1e-12 && r.y1 <= y1 + 1e-12;
    }
    bool contains_point(double x, double y, double margin = 0.0) const {
        return x >= x0 + margin && x <= x1 - margin && y >= y0 + margin && y <= y1 - margin;
    }
};

/// Staggered layout: u on vertical cell faces ((nx-1)*ny interior unknowns),
/// v on horizontal faces (nx*(ny-1)), pressure at cell centers (nx*ny).
class StaggeredGrid {
public:
    int nx = 0, ny = 0;
    std::vector<double> x_faces, y_faces;   // length nx+1 / ny+1, strictly increasing
    std::vector<double> dx, dy;             // cell widths
    std::vector<double> x_c, y_c;           // cell centers
    std::vector<double> del_x, del_y;       // center-to-center spans, del_x[i] = x_c[i+1]-x_c[i]
    Rect domain;
    Rect uniform_region;                    // snapped region of constant spacing h_min
    double h_min = 0.0;

    int n_u() const { return (nx - 1) * ny; }
    int n_v() const { return nx * (ny - 1); }
    int n_p() const { return nx * ny; }
    int n_q() const { return n_u() + n_v(); }

    // unknown indexing: u by interior face i_f in [1,nx-1], row-major in j;
    // v appended after all u unknowns.
    int u_id(int i_f, int j) const { return (i_f - 1) + j * (nx - 1); }
    int v_id(int i, int j_f) const { return n_u() + i + (j_f - 1) * nx; }
    int p_id(int i, int j) const { return i + j * nx; }

    double u_x(int i_f) const { return x_faces[static_cast<size_t>(i_f)]; }
    double u_y(int j) const { return y_c[static_cast<size_t>(j)]; }
    double v_x(int i) const { return x_c[static_cast<size_t>(i)]; }
    double v_y(int j_f) const { return y_faces[static_cast<size_t>(j_f)]; }

    /// Index of the cell containing x (clamped to valid range).
    int cell_of_x(double x) const { return locate(x_faces, x); }
    int cell_of_y(double y) const { return locate(y_faces, y); }

    /// Plain-text dump: cell-face coordinates, one per line, x block then y block,
    /// each preceded by its count.
    void write_faces(const std::string& path) const {
        std::FILE* f = std::fopen(path.c_str(), "w");
        if (!f) throw std::runtime_error("cannot open " + path);
        std::fprintf(f, "%d\n", nx + 1);
        for (double x : x_faces) std::fprintf(f, "%.17g\n", x);
        std::fprintf(f, "%d\n", ny + 1);
        for (double y : y_faces) std::fprintf(f, "%.17g\n", y);
        std::fclose(f);
    }

private:
    static int locate(const std::vector<double>& faces, double x) {
        auto it = std::upper_bound(faces.begin(), faces.end(), x);
        int i = static_cast<int>(it - faces.begin()) - 1;
        return std::clamp(i, 0, static_cast<int>(faces.size()) - 2);
    }
};

namespace detail {

/// One direction of the grid: uniform cells across [u0,u1] inside [d0,d1],
/// stretched geometrically toward each domain edge. The outermost cell on each
/// side absorbs the residual so the last face lands exactly on the boundary.
inline std::vector<double> build_axis_widths(double d0, double d1, double u0, double u1,
                                             double h, double ratio_lo, double ratio_hi,
                                             const char* axis) {
    const double width = u1 - u0;
    // snap outward: the uniform region may only grow, by at most half a cell
    const int n_uniform = static_cast<int>(std::ceil(width / h - 1e-9));
    if (n_uniform < 1)
        throw std::invalid_argument(std::string("grid: uniform region too small along ") + axis);
    const double growth = n_uniform * h - width;
    if (growth > 0.5 * h * (1.0 + 1e-9))
        throw std::invalid_argument(std::string("grid: uniform region along ") + axis +
                                    " is not within half a cell of an integer number of cells of h_min");

    auto stretched_side = [&](double extent, double ratio) {
        std::vector<double> w;
        if (extent <= 1e-12 * std::max(1.0, std::fabs(d1 - d0))) return w;
        double cum = 0.0, cell = h;
        while (cum < extent - 1e-12) {
            cell *= ratio;
            double next = std::min(cell, extent - cum);   // closure: last cell absorbs the residual
            w.push_back(next);
            cum += next;
            if (w.size() > 100000) throw std::runtime_error("grid: runaway stretching loop");
        }
        return w;
    };

    // snap outward, splitting the growth between the two sides
    const double lo_extent = (u0 - 0.5 * growth) - d0;
    const double hi_extent = d1 - (u1 + 0.5 * growth);
    if (lo_extent < -1e-12 || hi_extent < -1e-12)
        throw std::invalid_argument(std::string("grid: snapped uniform region exceeds domain along ") + axis);

    std::vector<double> lo = stretched_side(std::max(lo_extent, 0.0), ratio_lo);
    std::vector<double> hi = stretched_side(std::max(hi_extent, 0.0), ratio_hi);

    std::vector<double> widths;
    widths.reserve(lo.size() + static_cast<size_t>(n_uniform) + hi.size());
    for (auto it = lo.rbegin(); it != lo.rend(); ++it) widths.push_back(*it);
    for (int i = 0; i < n_uniform; ++i) widths.push_back(h);
    for (double w : hi) widths.push_back(w);
    return widths;
}

} // namespace detail

/// Build a stretched grid: uniform cells of width h_min fill uniform_region,
/// cells grow geometrically outward by the per-side ratios (left, right,
/// bottom, top) until the domain edge.
inline StaggeredGrid build_stretched_grid(const Rect& domain, const Rect& uniform_region,
                                          double h_min, const double ratio[4]) {
    if (h_min <= 0.0) throw std::invalid_argument("grid: h_min must be positive");
    for (int s = 0; s < 4; ++s)
        if (ratio[s] < 1.0) throw std::invalid_argument("grid: stretching ratio must be >= 1");
    if (!domain.contains(uniform_region))
        throw std::invalid_argument("grid: uniform region not contained in domain");

    StaggeredGrid g;
    g.domain = domain;
    g.h_min = h_min;
    g.dx = detail::build_axis_widths(domain.x0, domain.x1, uniform_region.x0, uniform_region.x1,
                                     h_min, ratio[0], ratio[1], "x");
    g.dy = detail::build_axis_widths(domain.y0, domain.y1, uniform_region.y0, uniform_region.y1,
                                     h_min, ratio[2], ratio[3], "y");
    g.nx = static_cast<int>(g.dx.size());
    g.ny = static_cast<int>(g.dy.size());
    if (g.nx < 2 || g.ny < 2) throw std::invalid_argument("grid: need at least 2 cells per direction");

    auto faces_from = [](double start, double end, const std::vector<double>& w) {
        std::vector<double> f(w.size() + 1);
        f[0] = start;
        for (size_t i = 0; i < w.size(); ++i) f[i + 1] = f[i] + w[i];
        f.back() = end;   // land exactly on the boundary
        return f;
    };
    g.x_faces = faces_from(domain.x0, domain.x1, g.dx);
    g.y_faces = faces_from(domain.y0, domain.y1, g.dy);
    // re-derive widths from faces so cumulative sums are exact
    for (int i = 0; i < g.nx; ++i) g.dx[static_cast<size_t>(i)] = g.x_faces[static_cast<size_t>(i) + 1] - g.x_faces[static_cast<size_t>(i)];
    for (int j = 0; j < g.ny; ++j) g.dy[static_cast<size_t>(j)] = g.y_faces[static_cast<size_t>(j) + 1] - g.y_faces[static_cast<size_t>(j)];
    for (double w : g.dx)
        if (w <= 0.0) throw std::runtime_error("grid: nonpositive cell width");
    for (double w : g.dy)
        if (w <= 0.0) throw std::runtime_error("grid: nonpositive cell width");

    g.x_c.resize(static_cast<size_t>(g.nx));
    g.y_c.resize(static_cast<size_t>(g.ny));
    for (int i = 0; i < g.nx; ++i) g.x_c[static_cast<size_t>(i)] = 0.5 * (g.x_faces[static_cast<size_t>(i)] + g.x_faces[static_cast<size_t>(i) + 1]);
    for (int j = 0; j < g.ny; ++j) g.y_c[static_cast<size_t>(j)] = 0.5 * (g.y_faces[static_cast<size_t>(j)] + g.y_faces[static_cast<size_t>(j) + 1]);
    g.del_x.resize(static_cast<size_t>(g.nx) - 1);
    g.del_y.resize(static_cast<size_t>(g.ny) - 1);
    for (int i = 0; i + 1 < g.nx; ++i) g.del_x[static_cast<size_t>(i)] = g.x_c[static_cast<size_t>(i) + 1] - g.x_c[static_cast<size_t>(i)];
    for (int j = 0; j + 1 < g.ny; ++j) g.del_y[static_cast<size_t>(j)] = g.y_c[static_cast<size_t>(j) + 1] - g.y_c[static_cast<size_t>(j)];

    const double gx = (std::ceil(uniform_region.width() / h_min - 1e-9) * h_min - uniform_region.width()) * 0.5;
    const double gy = (std::ceil(uniform_region.height() / h_min - 1e-9) * h_min - uniform_region.height()) * 0.5;
    g.uniform_region = {uniform_region.x0 - gx, uniform_region.x1 + gx,
                        uniform_region.y0 - gy, uniform_region.y1 + gy};
    return g;
}

/// Convenience overload for a fully uniform grid over the whole domain.
inline StaggeredGrid build_uniform_grid(const Rect& domain, double h) {
    const double r[4] = {1.0, 1.0, 1.0, 1.0};
    return build_stretched_grid(domain, domain, h, r);
}

} // namespace ibm
