/// \file io.hpp
/// \brief File outputs: force series, vorticity snapshots, Couette profiles
///        and exact-restart checkpoints.
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ibm/diagnostics.hpp"
#include "ibm/stepper.hpp"

namespace ibm {

class ForceWriter {
public:
    ForceWriter() = default;
    explicit ForceWriter(const std::string& path) {
        f_ = std::fopen(path.c_str(), "w");
        if (!f_) throw std::runtime_error("cannot open " + path);
        std::fprintf(f_, "t,fx,fy,cd,cl\n");
    }
    ~ForceWriter() {
        if (f_) std::fclose(f_);
    }
    ForceWriter(const ForceWriter&) = delete;
    ForceWriter& operator=(const ForceWriter&) = delete;

    void write(const ForceRecord& r) {
        std::fprintf(f_, "%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.fx, r.fy, r.cd, r.cl);
        std::fflush(f_);
    }

private:
    std::FILE* f_ = nullptr;
};

/// "x y omega" triples at the interior cell vertices.
inline void write_vorticity(const std::string& path, const StaggeredGrid& g,
                            const std::vector<double>& q) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open " + path);
    auto w = compute_vorticity(g, q);
    std::fprintf(f, "# vorticity at interior vertices: x y omega (%d x %d)\n", g.nx - 1, g.ny - 1);
    for (int j = 1; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i)
            std::fprintf(f, "%.9g %.9g %.9g\n", g.x_faces[static_cast<size_t>(i)],
                         g.y_faces[static_cast<size_t>(j)],
                         w[static_cast<size_t>(i - 1) + static_cast<size_t>(j - 1) * static_cast<size_t>(g.nx - 1)]);
    std::fclose(f);
}

inline void write_couette_profile(const std::string& path, const CouetteErrors& ce) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open " + path);
    std::fprintf(f, "r,u_theta,analytic\n");
    for (size_t i = 0; i < ce.r.size(); ++i)
        std::fprintf(f, "%.17g,%.17g,%.17g\n", ce.r[i], ce.num[i], ce.ana[i]);
    std::fclose(f);
}

// ---------------------------------------------------------------------------
// checkpoints: text format, %.17g round-trips doubles exactly
// ---------------------------------------------------------------------------

namespace io_detail {

inline void write_block(std::FILE* f, const char* name, const std::vector<double>& v) {
    std::fprintf(f, "%s %zu\n", name, v.size());
    for (double x : v) std::fprintf(f, "%.17g\n", x);
}

inline std::vector<double> read_block(std::ifstream& in, const std::string& expect) {
    std::string name;
    size_t n;
    if (!(in >> name >> n) || name != expect)
        throw std::runtime_error("checkpoint: expected block '" + expect + "', found '" + name + "'");
    std::vector<double> v(n);
    for (size_t i = 0; i < n; ++i)
        if (!(in >> v[i])) throw std::runtime_error("checkpoint: truncated block " + expect);
    return v;
}

} // namespace io_detail

inline void write_checkpoint(const std::string& path, const Stepper& st) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open " + path);
    const FlowState& s = st.state();
    std::fprintf(f, "ibmcfd-checkpoint 1\n");
    std::fprintf(f, "t %.17g\n", s.t);
    std::fprintf(f, "step %d\n", s.step_index);
    std::fprintf(f, "have_conv %d\n", s.have_conv_prev ? 1 : 0);
    io_detail::write_block(f, "q", s.q);
    io_detail::write_block(f, "conv_prev", s.conv_prev);
    io_detail::write_block(f, "lambda", s.lambda);
    const BoundaryState& b = st.boundary();
    io_detail::write_block(f, "left_u", b.left_u);
    io_detail::write_block(f, "right_u", b.right_u);
    io_detail::write_block(f, "left_v", b.left_v);
    io_detail::write_block(f, "right_v", b.right_v);
    io_detail::write_block(f, "bottom_v", b.bottom_v);
    io_detail::write_block(f, "top_v", b.top_v);
    io_detail::write_block(f, "bottom_u", b.bottom_u);
    io_detail::write_block(f, "top_u", b.top_u);
    std::fclose(f);
}

inline void read_checkpoint(const std::string& path, Stepper& st) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string magic;
    int version;
    if (!(in >> magic >> version) || magic != "ibmcfd-checkpoint" || version != 1)
        throw std::runtime_error("checkpoint: bad header in " + path);
    FlowState& s = st.state();
    std::string key;
    int have;
    if (!(in >> key >> s.t) || key != "t") throw std::runtime_error("checkpoint: missing t");
    if (!(in >> key >> s.step_index) || key != "step") throw std::runtime_error("checkpoint: missing step");
    if (!(in >> key >> have) || key != "have_conv") throw std::runtime_error("checkpoint: missing have_conv");
    s.have_conv_prev = have != 0;
    auto q = io_detail::read_block(in, "q");
    if (q.size() != s.q.size()) throw std::runtime_error("checkpoint: grid size mismatch");
    s.q = std::move(q);
    s.conv_prev = io_detail::read_block(in, "conv_prev");
    s.lambda = io_detail::read_block(in, "lambda");
    const int np = static_cast<int>(s.lambda.size()) - 2 * st.ops().n_b;
    s.phi.assign(s.lambda.begin(), s.lambda.begin() + np);
    s.f_tilde.assign(s.lambda.begin() + np, s.lambda.end());
    BoundaryState& b = st.boundary();
    b.left_u = io_detail::read_block(in, "left_u");
    b.right_u = io_detail::read_block(in, "right_u");
    b.left_v = io_detail::read_block(in, "left_v");
    b.right_v = io_detail::read_block(in, "right_v");
    b.bottom_v = io_detail::read_block(in, "bottom_v");
    b.top_v = io_detail::read_block(in, "top_v");
    b.bottom_u = io_detail::read_block(in, "bottom_u");
    b.top_u = io_detail::read_block(in, "top_u");
    // body positions and velocities follow the restored time
    st.sync_bodies_to_time();
}

} // namespace ibm
