/// \file body.hpp
/// \brief Lagrangian boundary points, the discrete delta function, and
///        prescribed rigid-body kinematics.
#pragma once

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace ibm {

/// Three-point smoothed delta of Roma, Peskin & Berger. Total function of r;
/// zero outside |r|/h > 1.5. Units 1/length.
inline double delta_roma(double r, double h) {
    const double a = std::fabs(r) / h;
    if (a <= 0.5)
        return (1.0 + std::sqrt(1.0 - 3.0 * a * a)) / (3.0 * h);
    if (a <= 1.5) {
        const double t = 1.0 - a;
        return (5.0 - 3.0 * a - std::sqrt(1.0 - 3.0 * t * t)) / (6.0 * h);
    }
    return 0.0;
}

enum class MotionKind { stationary, rotating, heaving, flapping };

struct MotionParams {
    MotionKind kind = MotionKind::stationary;
    // rotating
    double omega = 0.0;
    // heaving: reduced frequency k = omega_h*c/(2*u_ref) and kh = max heave
    // velocity / u_ref. The realized law is y(t) = h_amp*sin(omega_h*t); both
    // omega_h and h_amp can be pinned explicitly to change the convention.
    double k = 0.0, kh = 0.0;
    double heave_omega = 0.0, heave_amp = 0.0;
    // flapping: x(t) = A0/2 cos(2 pi f t), alpha(t) = alpha0 + beta sin(2 pi f t + phase)
    double A0 = 0.0, f = 0.0, alpha0 = 0.0, beta = 0.0, phase = 0.0;

    void finalize(double u_ref, double chord) {
        if (kind == MotionKind::heaving) {
            if (heave_omega == 0.0) heave_omega = 2.0 * k * u_ref / chord;
            if (heave_amp == 0.0) heave_amp = kh * u_ref / heave_omega;
            if (heave_omega <= 0.0) throw std::invalid_argument("motion: heaving frequency must be positive");
        }
        if (kind == MotionKind::flapping && f <= 0.0)
            throw std::invalid_argument("motion: flapping frequency must be positive");
    }
};

/// Rigid transform of the body at a given time plus its time derivative.
struct MotionState {
    double offset_x = 0.0, offset_y = 0.0;   // centroid translation
    double angle = 0.0;                      // rotation about the centroid
    double vel_x = 0.0, vel_y = 0.0;         // translation velocity
    double angular_vel = 0.0;
};

inline MotionState body_motion(const MotionParams& m, double t) {
    MotionState s;
    switch (m.kind) {
        case MotionKind::stationary:
            break;
        case MotionKind::rotating:
            s.angle = m.omega * t;
            s.angular_vel = m.omega;
            break;
        case MotionKind::heaving:
            s.offset_y = m.heave_amp * std::sin(m.heave_omega * t);
            s.vel_y = m.heave_amp * m.heave_omega * std::cos(m.heave_omega * t);
            break;
        case MotionKind::flapping: {
            const double w = 2.0 * std::numbers::pi * m.f;
            s.offset_x = 0.5 * m.A0 * std::cos(w * t);
            s.vel_x = -0.5 * m.A0 * w * std::sin(w * t);
            s.angle = m.alpha0 + m.beta * std::sin(w * t + m.phase);
            s.angular_vel = m.beta * w * std::cos(w * t + m.phase);
            break;
        }
    }
    return s;
}

/// Immersed body sampled at Lagrangian points with target arc spacing ds.
/// Reference shape is stored about its centroid; current points are produced
/// by the rigid transform of the active motion.
struct LagrangianBody {
    std::vector<double> ref_x, ref_y;        // shape about the centroid
    std::vector<double> x, y;                // current point positions
    std::vector<double> ub_x, ub_y;          // prescribed velocity at each point
    double center_x = 0.0, center_y = 0.0;   // reference centroid position
    double ds = 0.0;
    MotionParams motion;
    bool shape_rotation_invariant = false;   // circles: rotating leaves the point set fixed
    // startup nudge: begin offset in y and recentre smoothly over a duration
    double preamble_offset = 0.0, preamble_duration = 0.0;

    int n() const { return static_cast<int>(ref_x.size()); }

    bool base_motion_static() const {
        if (motion.kind == MotionKind::stationary) return true;
        if (motion.kind == MotionKind::rotating && shape_rotation_invariant) return true;
        return false;
    }

    /// True when the point positions never change (interpolation operators can
    /// be assembled once).
    bool geometry_static() const {
        return base_motion_static() && (preamble_offset == 0.0 || preamble_duration <= 0.0);
    }

    /// Time after which the point positions stop changing (infinity for
    /// genuinely moving bodies).
    double static_after() const {
        if (geometry_static()) return 0.0;
        if (base_motion_static()) return preamble_duration;
        return std::numeric_limits<double>::infinity();
    }

    /// Place points and velocities at time t.
    void move_to(double t) {
        MotionState s = body_motion(motion, t);
        if (preamble_offset != 0.0 && preamble_duration > 0.0 && t < preamble_duration) {
            const double w = std::numbers::pi / preamble_duration;
            s.offset_y += preamble_offset * 0.5 * (1.0 + std::cos(w * t));
            s.vel_y += -preamble_offset * 0.5 * w * std::sin(w * t);
        }
        const double c = std::cos(s.angle), sn = std::sin(s.angle);
        const double cx = center_x + s.offset_x, cy = center_y + s.offset_y;
        for (int i = 0; i < n(); ++i) {
            double rx, ry;
            if (motion.kind == MotionKind::rotating && shape_rotation_invariant) {
                rx = ref_x[static_cast<size_t>(i)];   // keep the sample set fixed on the circle
                ry = ref_y[static_cast<size_t>(i)];
            } else {
                rx = c * ref_x[static_cast<size_t>(i)] - sn * ref_y[static_cast<size_t>(i)];
                ry = sn * ref_x[static_cast<size_t>(i)] + c * ref_y[static_cast<size_t>(i)];
            }
            x[static_cast<size_t>(i)] = cx + rx;
            y[static_cast<size_t>(i)] = cy + ry;
            ub_x[static_cast<size_t>(i)] = s.vel_x - s.angular_vel * ry;
            ub_y[static_cast<size_t>(i)] = s.vel_y + s.angular_vel * rx;
        }
    }
};

inline LagrangianBody discretize_circle(double cx, double cy, double diameter, double h) {
    if (diameter <= 0.0 || h <= 0.0) throw std::invalid_argument("body: circle needs positive diameter and h");
    const double perim = std::numbers::pi * diameter;
    const int n = std::max(4, static_cast<int>(std::ceil(perim / h - 1e-9)));
    if (n < 4) throw std::invalid_argument("body: degenerate circle");
    LagrangianBody b;
    b.center_x = cx;
    b.center_y = cy;
    b.ds = perim / n;
    b.shape_rotation_invariant = true;
    b.ref_x.resize(static_cast<size_t>(n));
    b.ref_y.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double th = 2.0 * std::numbers::pi * i / n;
        b.ref_x[static_cast<size_t>(i)] = 0.5 * diameter * std::cos(th);
        b.ref_y[static_cast<size_t>(i)] = 0.5 * diameter * std::sin(th);
    }
    b.x = b.ref_x;
    b.y = b.ref_y;
    for (double& v : b.x) v += cx;
    for (double& v : b.y) v += cy;
    b.ub_x.assign(static_cast<size_t>(n), 0.0);
    b.ub_y.assign(static_cast<size_t>(n), 0.0);
    return b;
}

namespace detail {

/// Adaptive Simpson quadrature.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

} // namespace detail

/// Perimeter of the ellipse x = a cos t, y = b sin t.
inline double ellipse_perimeter(double a, double b, double tol = 1e-12) {
    auto speed = [a, b](double t) {
        const double s = std::sin(t), c = std::cos(t);
        return std::sqrt(a * a * s * s + b * b * c * c);
    };
    return 4.0 * detail::integrate(speed, 0.0, 0.5 * std::numbers::pi, tol);
}

/// Ellipse of given chord and thickness ratio, points distributed by equal
/// arc length (inverting the cumulative arc-length integral).
inline LagrangianBody discretize_ellipse(double cx, double cy, double chord,
                                         double thickness_ratio, double h, int n_override = 0) {
    if (thickness_ratio <= 0.0 || thickness_ratio > 1.0)
        throw std::invalid_argument("body: thickness ratio must be in (0, 1]");
    if (chord <= 0.0 || h <= 0.0) throw std::invalid_argument("body: ellipse needs positive chord and h");
    const double a = 0.5 * chord, b = 0.5 * chord * thickness_ratio;
    auto speed = [a, b](double t) {
        const double s = std::sin(t), c = std::cos(t);
        return std::sqrt(a * a * s * s + b * b * c * c);
    };
    const double perim = ellipse_perimeter(a, b);
    const int n = n_override > 0 ? n_override
                                 : std::max(4, static_cast<int>(std::lround(perim / h)));
    if (n < 4) throw std::invalid_argument("body: degenerate ellipse");

    LagrangianBody body;
    body.center_x = cx;
    body.center_y = cy;
    body.ds = perim / n;
    body.ref_x.resize(static_cast<size_t>(n));
    body.ref_y.resize(static_cast<size_t>(n));
    // march the arc-length parameter, refining each target with Newton steps
    double t = 0.0;
    for (int i = 0; i < n; ++i) {
        if (i > 0) {
            const double target = body.ds;
            double step = target / speed(t);
            double lo = t;
            double s_acc = detail::integrate(speed, lo, lo + step, 1e-12);
            for (int it = 0; it < 60; ++it) {
                const double err = s_acc - target;
                if (std::fabs(err) < 1e-11 * target) break;
                step -= err / speed(lo + step);
                s_acc = detail::integrate(speed, lo, lo + step, 1e-12);
            }
            t = lo + step;
        }
        body.ref_x[static_cast<size_t>(i)] = a * std::cos(t);
        body.ref_y[static_cast<size_t>(i)] = b * std::sin(t);
    }
    body.x = body.ref_x;
    body.y = body.ref_y;
    for (double& v : body.x) v += cx;
    for (double& v : body.y) v += cy;
    body.ub_x.assign(static_cast<size_t>(n), 0.0);
    body.ub_y.assign(static_cast<size_t>(n), 0.0);
    return body;
}

/// Arbitrary shape from a plain-text point list, one "xi eta" pair per line.
inline LagrangianBody body_from_point_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("body: cannot open point file " + path);
    LagrangianBody b;
    double px, py;
    while (in >> px >> py) {
        b.x.push_back(px);
        b.y.push_back(py);
    }
    if (b.n() < 4) throw std::invalid_argument("body: point file needs at least 4 points");
    double sx = 0.0, sy = 0.0;
    for (int i = 0; i < b.n(); ++i) {
        sx += b.x[static_cast<size_t>(i)];
        sy += b.y[static_cast<size_t>(i)];
    }
    b.center_x = sx / b.n();
    b.center_y = sy / b.n();
    b.ref_x = b.x;
    b.ref_y = b.y;
    for (double& v : b.ref_x) v -= b.center_x;
    for (double& v : b.ref_y) v -= b.center_y;
    double per = 0.0;
    for (int i = 0; i < b.n(); ++i) {
        const int j = (i + 1) % b.n();
        per += std::hypot(b.x[static_cast<size_t>(j)] - b.x[static_cast<size_t>(i)],
                          b.y[static_cast<size_t>(j)] - b.y[static_cast<size_t>(i)]);
    }
    b.ds = per / b.n();
    b.ub_x.assign(static_cast<size_t>(b.n()), 0.0);
    b.ub_y.assign(static_cast<size_t>(b.n()), 0.0);
    return b;
}

} // namespace ibm
