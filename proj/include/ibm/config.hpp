/// \file config.hpp
/// \brief Case configuration: a flat key-value text format with [section]
///        headers. Unknown keys are hard errors; all defaults are set here.
#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ibm/amg.hpp"
#include "ibm/body.hpp"
#include "ibm/boundary.hpp"
#include "ibm/grid.hpp"
#include "ibm/krylov.hpp"

namespace ibm {

enum class SolverKind { cg, pcg_diag, pcg_sa, amg };

inline SolverKind solver_kind_from(const std::string& s) {
    if (s == "cg") return SolverKind::cg;
    if (s == "pcg-diag") return SolverKind::pcg_diag;
    if (s == "pcg-sa") return SolverKind::pcg_sa;
    if (s == "amg") return SolverKind::amg;
    throw std::invalid_argument("config: unknown solver '" + s + "' (cg, pcg-diag, pcg-sa, amg)");
}

struct SolverConfig {
    SolverKind kind = SolverKind::pcg_sa;
    SolverParams params;          // rel_tol 1e-5, max_iters 2000
    SaOptions sa;                 // theta 0.25, max_coarse 64
};

struct BodyConfig {
    enum class Shape { circle, ellipse, points } shape = Shape::circle;
    double cx = 0.0, cy = 0.0;
    double diameter = 1.0;
    double chord = 1.0, thickness_ratio = 0.12;
    int n_points = 0;             // optional explicit override
    std::string points_file;
    MotionParams motion;
    // wake-triggering preamble: start offset in y, recentred over a duration
    double preamble_offset = 0.0, preamble_duration = 0.0;
};

struct ValidationConfig {
    bool couette = false;
    double omega = 0.0, r_i = 0.0, r_o = 0.0;
    int samples = 100;
    double exclude = 0.0;         // 0: 1.5*h of the run's grid
    double ray_angle = std::numbers::pi / 6.0;
};

struct CaseConfig {
    // grid
    Rect domain, uniform;
    double h_min = 0.0;
    double ratio[4] = {1.0, 1.0, 1.0, 1.0};
    // fluid
    double nu = 0.0;
    double re = 0.0;
    double u_inf = 1.0;
    double ref_length = 1.0;
    double u0 = 0.0, v0 = 0.0;    // initial uniform velocity
    // time
    double dt = 0.0;
    int n_steps = 0;
    int n_out = 0;
    int checkpoint_every = 0;
    // bodies and boundary conditions
    std::vector<BodyConfig> bodies;
    BcSpec bc;
    // solvers and stepping
    SolverConfig solve1, solve2;
    int n_pc = 2;
    int n_order = 1;
    int slice_rows = 0;
    std::string out_dir = "out";
    ValidationConfig validation;

    void validate() {
        if (dt <= 0.0) throw std::invalid_argument("config: dt must be positive");
        if (n_steps <= 0) throw std::invalid_argument("config: n_steps must be positive");
        if (h_min <= 0.0) throw std::invalid_argument("config: h_min must be positive");
        if (n_pc < 1) throw std::invalid_argument("config: n_pc must be >= 1");
        if (n_order < 1 || n_order > 3) throw std::invalid_argument("config: n_order must be 1, 2 or 3");
        if (nu > 0.0 && re > 0.0) {
            const double re_from_nu = u_inf * ref_length / nu;
            if (std::fabs(re_from_nu - re) > 1e-9 * re)
                throw std::invalid_argument("config: re and nu are inconsistent (re = u_inf*ref_length/nu gives " +
                                            std::to_string(re_from_nu) + ")");
        } else if (re > 0.0) {
            nu = u_inf * ref_length / re;
        } else if (nu <= 0.0) {
            throw std::invalid_argument("config: one of nu or re is required");
        }
        solve1.params.validate();
        solve2.params.validate();
    }
};

namespace cfg_detail {

struct Line {
    int number;
    std::string section;
    std::string key;
    std::vector<std::string> tokens;
};

inline std::vector<double> reals(const Line& l, size_t count) {
    if (l.tokens.size() != count)
        throw std::invalid_argument("config line " + std::to_string(l.number) + ": key '" + l.key +
                                    "' expects " + std::to_string(count) + " value(s)");
    std::vector<double> v;
    for (const auto& t : l.tokens) {
        try {
            size_t pos = 0;
            v.push_back(std::stod(t, &pos));
            if (pos != t.size()) throw std::invalid_argument(t);
        } catch (...) {
            throw std::invalid_argument("config line " + std::to_string(l.number) + ": bad number '" + t + "'");
        }
    }
    return v;
}

inline double real1(const Line& l) { return reals(l, 1)[0]; }

inline int int1(const Line& l) {
    const double d = real1(l);
    if (d != std::floor(d)) throw std::invalid_argument("config line " + std::to_string(l.number) + ": expected an integer");
    return static_cast<int>(d);
}

inline EdgeBc parse_edge(const Line& l) {
    if (l.tokens.empty()) throw std::invalid_argument("config line " + std::to_string(l.number) + ": empty edge spec");
    EdgeBc e;
    if (l.tokens[0] == "dirichlet") {
        if (l.tokens.size() != 3)
            throw std::invalid_argument("config line " + std::to_string(l.number) + ": dirichlet expects u and v");
        e.kind = BcKind::dirichlet;
        e.u = std::stod(l.tokens[1]);
        e.v = std::stod(l.tokens[2]);
    } else if (l.tokens[0] == "convective") {
        e.kind = BcKind::convective;
    } else {
        throw std::invalid_argument("config line " + std::to_string(l.number) + ": unknown edge kind '" + l.tokens[0] + "'");
    }
    return e;
}

inline void parse_solver(SolverConfig& s, const Line& l) {
    if (l.key == "type") {
        if (l.tokens.size() != 1) throw std::invalid_argument("config line " + std::to_string(l.number) + ": type expects one token");
        s.kind = solver_kind_from(l.tokens[0]);
    } else if (l.key == "rel_tol") {
        s.params.rel_tol = real1(l);
    } else if (l.key == "max_iters") {
        s.params.max_iters = int1(l);
    } else if (l.key == "sa_theta") {
        s.sa.theta = real1(l);
    } else if (l.key == "sa_max_coarse") {
        s.sa.max_coarse = int1(l);
    } else {
        throw std::invalid_argument("config line " + std::to_string(l.number) + ": unknown solver key '" + l.key + "'");
    }
}

inline void parse_body(BodyConfig& b, const Line& l) {
    if (l.key == "shape") {
        const std::string& s = l.tokens.at(0);
        if (s == "circle") b.shape = BodyConfig::Shape::circle;
        else if (s == "ellipse") b.shape = BodyConfig::Shape::ellipse;
        else if (s == "points") b.shape = BodyConfig::Shape::points;
        else throw std::invalid_argument("config line " + std::to_string(l.number) + ": unknown shape '" + s + "'");
    } else if (l.key == "center") {
        auto v = reals(l, 2);
        b.cx = v[0];
        b.cy = v[1];
    } else if (l.key == "diameter") {
        b.diameter = real1(l);
    } else if (l.key == "chord") {
        b.chord = real1(l);
    } else if (l.key == "thickness_ratio") {
        b.thickness_ratio = real1(l);
    } else if (l.key == "points") {
        b.n_points = int1(l);
    } else if (l.key == "points_file") {
        b.points_file = l.tokens.at(0);
    } else if (l.key == "motion") {
        const std::string& kind = l.tokens.at(0);
        if (kind == "stationary") {
            b.motion.kind = MotionKind::stationary;
        } else if (kind == "rotating") {
            if (l.tokens.size() != 2) throw std::invalid_argument("config line " + std::to_string(l.number) + ": rotating expects omega");
            b.motion.kind = MotionKind::rotating;
            b.motion.omega = std::stod(l.tokens[1]);
        } else if (kind == "heaving") {
            if (l.tokens.size() != 3) throw std::invalid_argument("config line " + std::to_string(l.number) + ": heaving expects k and kh");
            b.motion.kind = MotionKind::heaving;
            b.motion.k = std::stod(l.tokens[1]);
            b.motion.kh = std::stod(l.tokens[2]);
        } else if (kind == "flapping") {
            if (l.tokens.size() != 6)
                throw std::invalid_argument("config line " + std::to_string(l.number) + ": flapping expects A0 f alpha0 beta phase");
            b.motion.kind = MotionKind::flapping;
            b.motion.A0 = std::stod(l.tokens[1]);
            b.motion.f = std::stod(l.tokens[2]);
            b.motion.alpha0 = std::stod(l.tokens[3]);
            b.motion.beta = std::stod(l.tokens[4]);
            b.motion.phase = std::stod(l.tokens[5]);
        } else {
            throw std::invalid_argument("config line " + std::to_string(l.number) + ": unknown motion '" + kind + "'");
        }
    } else if (l.key == "heave_omega") {
        b.motion.heave_omega = real1(l);
    } else if (l.key == "heave_amp") {
        b.motion.heave_amp = real1(l);
    } else if (l.key == "preamble") {
        auto v = reals(l, 2);
        b.preamble_offset = v[0];
        b.preamble_duration = v[1];
    } else {
        throw std::invalid_argument("config line " + std::to_string(l.number) + ": unknown body key '" + l.key + "'");
    }
}

} // namespace cfg_detail

inline CaseConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);

    CaseConfig c;
    c.solve1.kind = SolverKind::pcg_diag;   // momentum solve default
    std::string line, section;
    int line_no = 0;
    bool body_open = false;

    while (std::getline(in, line)) {
        ++line_no;
        const size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ss(line);
        std::string first;
        if (!(ss >> first)) continue;

        if (first.front() == '[') {
            section = first.substr(1, first.find(']') - 1);
            if (section != "grid" && section != "fluid" && section != "time" && section != "body" &&
                section != "bc" && section != "solver1" && section != "solver2" && section != "stepping" &&
                section != "output" && section != "validation")
                throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown section [" + section + "]");
            if (section == "body") {
                c.bodies.emplace_back();
                body_open = true;
            } else {
                body_open = false;
            }
            continue;
        }

        cfg_detail::Line l;
        l.number = line_no;
        l.section = section;
        l.key = first;
        std::string eq;
        if (!(ss >> eq) || eq != "=")
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected 'key = value'");
        std::string tok;
        while (ss >> tok) l.tokens.push_back(tok);

        if (section == "grid") {
            if (l.key == "domain") {
                auto v = cfg_detail::reals(l, 4);
                c.domain = {v[0], v[1], v[2], v[3]};
            } else if (l.key == "uniform") {
                auto v = cfg_detail::reals(l, 4);
                c.uniform = {v[0], v[1], v[2], v[3]};
            } else if (l.key == "h_min") {
                c.h_min = cfg_detail::real1(l);
            } else if (l.key == "ratio") {
                auto v = cfg_detail::reals(l, 4);
                for (int s = 0; s < 4; ++s) c.ratio[s] = v[static_cast<size_t>(s)];
            } else {
                throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown grid key '" + l.key + "'");
            }
        } else if (section == "fluid") {
            if (l.key == "nu") c.nu = cfg_detail::real1(l);
            else if (l.key == "re") c.re = cfg_detail::real1(l);
            else if (l.key == "u_inf") c.u_inf = cfg_detail::real1(l);
            else if (l.key == "ref_length") c.ref_length = cfg_detail::real1(l);
            else if (l.key == "initial_velocity") {
                auto v = cfg_detail::reals(l, 2);
                c.u0 = v[0];
                c.v0 = v[1];
            } else throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown fluid key '" + l.key + "'");
        } else if (section == "time") {
            if (l.key == "dt") c.dt = cfg_detail::real1(l);
            else if (l.key == "n_steps") c.n_steps = cfg_detail::int1(l);
            else if (l.key == "n_out") c.n_out = cfg_detail::int1(l);
            else throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown time key '" + l.key + "'");
        } else if (section == "body") {
            if (!body_open) throw std::invalid_argument("config line " + std::to_string(line_no) + ": body key outside [body]");
            cfg_detail::parse_body(c.bodies.back(), l);
        } else if (section == "bc") {
            if (l.key == "left") c.bc.left = cfg_detail::parse_edge(l);
            else if (l.key == "right") c.bc.right = cfg_detail::parse_edge(l);
            else if (l.key == "top") c.bc.top = cfg_detail::parse_edge(l);
            else if (l.key == "bottom") c.bc.bottom = cfg_detail::parse_edge(l);
            else throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown bc key '" + l.key + "'");
        } else if (section == "solver1") {
            cfg_detail::parse_solver(c.solve1, l);
        } else if (section == "solver2") {
            cfg_detail::parse_solver(c.solve2, l);
        } else if (section == "stepping") {
            if (l.key == "n_pc") c.n_pc = cfg_detail::int1(l);
            else if (l.key == "n_order") c.n_order = cfg_detail::int1(l);
            else if (l.key == "slice_rows") c.slice_rows = cfg_detail::int1(l);
            else throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown stepping key '" + l.key + "'");
        } else if (section == "output") {
            if (l.key == "dir") c.out_dir = l.tokens.at(0);
            else if (l.key == "checkpoint_every") c.checkpoint_every = cfg_detail::int1(l);
            else throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown output key '" + l.key + "'");
        } else if (section == "validation") {
            if (l.key == "couette") {
                auto v = cfg_detail::reals(l, 3);
                c.validation.couette = true;
                c.validation.omega = v[0];
                c.validation.r_i = v[1];
                c.validation.r_o = v[2];
            } else if (l.key == "samples") {
                c.validation.samples = cfg_detail::int1(l);
            } else if (l.key == "exclude") {
                c.validation.exclude = cfg_detail::real1(l);
            } else if (l.key == "ray_angle") {
                c.validation.ray_angle = cfg_detail::real1(l);
            } else {
                throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown validation key '" + l.key + "'");
            }
        } else {
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": key outside any section");
        }
    }

    c.bc.u_inf = c.u_inf;
    c.validate();
    return c;
}

/// Instantiate the Lagrangian bodies of a case at t = 0.
inline std::vector<LagrangianBody> build_bodies(const CaseConfig& c) {
    std::vector<LagrangianBody> bodies;
    for (const auto& bc : c.bodies) {
        LagrangianBody b;
        switch (bc.shape) {
            case BodyConfig::Shape::circle: {
                const double h_eff = bc.n_points > 0 ? std::numbers::pi * bc.diameter / bc.n_points : c.h_min;
                b = discretize_circle(bc.cx, bc.cy, bc.diameter, h_eff);
                break;
            }
            case BodyConfig::Shape::ellipse:
                b = discretize_ellipse(bc.cx, bc.cy, bc.chord, bc.thickness_ratio, c.h_min, bc.n_points);
                break;
            case BodyConfig::Shape::points:
                b = body_from_point_file(bc.points_file);
                break;
        }
        b.motion = bc.motion;
        b.motion.finalize(c.u_inf > 0.0 ? c.u_inf : 1.0,
                          bc.shape == BodyConfig::Shape::circle ? bc.diameter : bc.chord);
        b.preamble_offset = bc.preamble_offset;
        b.preamble_duration = bc.preamble_duration;
        bodies.push_back(std::move(b));
    }
    return bodies;
}

} // namespace ibm
