/// \file runner.hpp
/// \brief Case driver: assembly, time loop, outputs, timing breakdown, and
///        the solver comparison bench.
#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "ibm/config.hpp"
#include "ibm/io.hpp"
#include "ibm/stepper.hpp"

namespace ibm {

struct PhaseTimes {
    double assembly = 0.0;
    double precond = 0.0;
    double explicit_terms = 0.0;
    double solve1 = 0.0;
    double solve2 = 0.0;
    double projection = 0.0;
    double diagnostics = 0.0;

    void print(std::FILE* f) const {
        const double total = assembly + precond + explicit_terms + solve1 + solve2 + projection + diagnostics;
        auto row = [&](const char* name, double s) {
            std::fprintf(f, "  %-16s %10.3f s  %5.1f%%\n", name, s, total > 0 ? 100.0 * s / total : 0.0);
        };
        std::fprintf(f, "timing breakdown:\n");
        row("assembly", assembly);
        row("precond build", precond);
        row("explicit terms", explicit_terms);
        row("solve 1", solve1);
        row("solve 2", solve2);
        row("projection", projection);
        row("diagnostics", diagnostics);
        std::fprintf(f, "  %-16s %10.3f s\n", "total", total);
    }
};

struct RunResult {
    int exit_code = 0;
    std::string message;
    PhaseTimes times;
    std::vector<double> force_t, force_cd, force_cl;   // per-step coefficient series
    double last_cd = 0.0, last_cl = 0.0;
    long total_solve1_iters = 0, total_solve2_iters = 0;
    int hierarchy_builds = 0;
    double max_div_residual = 0.0, max_noslip_residual = 0.0;
    int steps_done = 0;
};

struct RunOptions {
    std::string out_dir_override;
    std::string resume_from;
    bool quiet = false;
    int n_steps_override = 0;
};

inline SteppingParams stepping_from(const CaseConfig& c) {
    SteppingParams p;
    p.dt = c.dt;
    p.n_order = c.n_order;
    p.n_pc = c.n_pc;
    p.slice_rows = c.slice_rows;
    p.solve1 = c.solve1.params;
    p.solve2 = c.solve2.params;
    p.sa = c.solve2.sa;
    return p;
}

/// Execute a case end to end. Writes the force CSV, vorticity snapshots and
/// checkpoints into the output directory; prints the per-phase timing table.
inline RunResult run_case(const CaseConfig& cfg, const RunOptions& opts = {}) {
    namespace fs = std::filesystem;
    using clock = std::chrono::steady_clock;
    RunResult res;

    const std::string out = opts.out_dir_override.empty() ? cfg.out_dir : opts.out_dir_override;
    fs::create_directories(out);

    auto t0 = clock::now();
    StaggeredGrid grid = build_stretched_grid(cfg.domain, cfg.uniform, cfg.h_min, cfg.ratio);
    std::vector<LagrangianBody> bodies = build_bodies(cfg);
    Stepper st(grid, std::move(bodies), cfg.bc, cfg.nu, stepping_from(cfg), cfg.u0, cfg.v0);
    res.times.assembly += std::chrono::duration<double>(clock::now() - t0).count();
    ++res.hierarchy_builds;

    if (!opts.resume_from.empty()) read_checkpoint(opts.resume_from, st);

    ForceWriter fw(out + "/forces.csv");

    const int n_steps = opts.n_steps_override > 0 ? opts.n_steps_override : cfg.n_steps;
    const int start_step = st.state().step_index;
    std::string last_checkpoint;

    for (int k = start_step; k < n_steps; ++k) {
        StepReport rep = st.advance();
        res.times.assembly += rep.t_assembly;
        res.times.precond += rep.t_precond;
        res.times.explicit_terms += rep.t_explicit;
        res.times.solve1 += rep.t_solve1;
        res.times.solve2 += rep.t_solve2;
        res.times.projection += rep.t_projection;
        res.total_solve1_iters += rep.solve1_iters;
        res.total_solve2_iters += rep.solve2_iters;
        if (rep.rebuilt_hierarchy) ++res.hierarchy_builds;
        res.max_div_residual = std::max(res.max_div_residual, rep.div_residual);
        res.max_noslip_residual = std::max(res.max_noslip_residual, rep.noslip_residual);

        if (!rep.ok) {
            res.exit_code = 1;
            res.message = rep.message +
                          (last_checkpoint.empty() ? "" : "; last good checkpoint: " + last_checkpoint);
            std::fprintf(stderr, "step %d failed: %s\n", k, res.message.c_str());
            return res;
        }

        auto td = clock::now();
        if (st.ops().n_b > 0) {
            auto f = compute_force_coefficients(st.state().f_tilde, st.ops().n_b, st.state().t,
                                                cfg.u_inf, cfg.ref_length);
            fw.write(f);
            res.force_t.push_back(f.t);
            res.force_cd.push_back(f.cd);
            res.force_cl.push_back(f.cl);
            res.last_cd = f.cd;
            res.last_cl = f.cl;
        }
        if (cfg.n_out > 0 && (k + 1) % cfg.n_out == 0)
            write_vorticity(out + "/vorticity_" + std::to_string(k + 1) + ".txt", grid, st.state().q);
        if (cfg.checkpoint_every > 0 && (k + 1) % cfg.checkpoint_every == 0) {
            last_checkpoint = out + "/checkpoint_" + std::to_string(k + 1) + ".txt";
            write_checkpoint(last_checkpoint, st);
        }
        res.times.diagnostics += std::chrono::duration<double>(clock::now() - td).count();
        res.steps_done = k + 1;

        if (!opts.quiet && ((k + 1) % 100 == 0 || k + 1 == n_steps))
            std::fprintf(stderr, "step %6d/%d  t=%.4f  s1 %3d  s2 %3d  div %.2e  slip %.2e%s  cd %.4f\n",
                         k + 1, n_steps, st.state().t, rep.solve1_iters, rep.solve2_iters,
                         rep.div_residual, rep.noslip_residual, rep.rebuilt_hierarchy ? " [pc]" : "",
                         res.last_cd);
    }

    // final snapshot and checkpoint
    write_vorticity(out + "/vorticity_final.txt", grid, st.state().q);
    write_checkpoint(out + "/checkpoint_final.txt", st);

    if (cfg.validation.couette) {
        const double excl = cfg.validation.exclude > 0.0 ? cfg.validation.exclude : 1.5 * grid.h_min;
        auto ce = couette_profile_error(grid, st.state().q, st.boundary(), cfg.validation.omega,
                                        cfg.validation.r_i, cfg.validation.r_o, excl,
                                        cfg.validation.samples, cfg.validation.ray_angle);
        write_couette_profile(out + "/couette_profile.csv", ce);
        std::fprintf(stdout, "couette profile: L2 rel error %.6e  Linf rel error %.6e\n", ce.l2_rel, ce.linf_rel);
    }

    if (!opts.quiet) res.times.print(stdout);
    return res;
}

// ---------------------------------------------------------------------------
// solver bench
// ---------------------------------------------------------------------------

struct BenchRow {
    std::string name;
    int iterations = 0;
    double seconds = 0.0;
    double rel_residual = 0.0;
    bool converged = false;
};

/// Assemble the coupled matrix of a case (or take one directly) and run all
/// four solver variants on the same right-hand side.
inline std::vector<BenchRow> solver_bench_matrix(const SparseMatrix& lhs2, int pin_index,
                                                 const SolverParams& params, const SaOptions& sa) {
    using clock = std::chrono::steady_clock;
    // deterministic consistent right-hand side: b = A w, unit-norm w, w[pin] = 0
    std::vector<double> w(static_cast<size_t>(lhs2.rows()));
    for (size_t i = 0; i < w.size(); ++i) w[i] = std::sin(0.7 * static_cast<double>(i) + 0.3);
    if (pin_index >= 0) w[static_cast<size_t>(pin_index)] = 0.0;
    const double wn = norm2(w);
    for (double& x : w) x /= wn;
    const std::vector<double> b = lhs2.spmv(w);

    std::vector<BenchRow> rows;
    auto push = [&](const std::string& name, const SolveResult& r, double secs) {
        rows.push_back({name, r.iterations, secs, r.rel_residual, r.converged()});
    };

    {
        auto t0 = clock::now();
        auto r = cg(lhs2, b, {}, params);
        push("cg", r, std::chrono::duration<double>(clock::now() - t0).count());
    }
    {
        auto t0 = clock::now();
        DiagonalPreconditioner pc(lhs2);
        auto r = pcg(lhs2, b, {}, pc, params);
        push("pcg-diag", r, std::chrono::duration<double>(clock::now() - t0).count());
    }
    {
        auto t0 = clock::now();
        auto h = build_sa_hierarchy(lhs2, sa);
        SaPreconditioner pc(h);
        auto r = pcg(lhs2, b, {}, pc, params);
        push("pcg-sa", r, std::chrono::duration<double>(clock::now() - t0).count());
    }
    {
        auto t0 = clock::now();
        auto h = build_sa_hierarchy(lhs2, sa);
        auto r = amg_solve(lhs2, h, b, {}, params);
        push("amg", r, std::chrono::duration<double>(clock::now() - t0).count());
    }
    return rows;
}

inline std::vector<BenchRow> solver_bench_case(const CaseConfig& cfg) {
    StaggeredGrid grid = build_stretched_grid(cfg.domain, cfg.uniform, cfg.h_min, cfg.ratio);
    auto bodies = build_bodies(cfg);
    for (auto& b : bodies) b.move_to(0.0);
    auto ops = assemble_operators(grid, bodies, cfg.dt, cfg.nu, cfg.n_order, 0, cfg.slice_rows);
    std::fprintf(stdout, "coupled system: dimension %d, nonzeros %d\n", ops.lhs2.rows(), ops.lhs2.nnz());
    SaOptions sa = cfg.solve2.sa;
    sa.keep_fine_tail = 2 * ops.n_b;
    return solver_bench_matrix(ops.lhs2, 0, cfg.solve2.params, sa);
}

inline void print_bench(const std::vector<BenchRow>& rows, std::FILE* f) {
    std::fprintf(f, "%-10s %12s %12s %14s %10s\n", "solver", "iterations", "time [s]", "rel residual", "status");
    for (const auto& r : rows)
        std::fprintf(f, "%-10s %12d %12.4f %14.3e %10s\n", r.name.c_str(), r.iterations, r.seconds,
                     r.rel_residual, r.converged ? "ok" : "FAILED");
}

} // namespace ibm
