// Command-line driver: run a case, bench the solvers on its coupled matrix,
// or dump the grid faces. Exit codes: 0 ok, 1 runtime failure, 2 config error.
#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "ibm/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"ibmcfd - immersed-boundary incompressible flow solver"};
    app.require_subcommand(1);

    int threads = 1;
    app.add_option("--threads", threads, "worker threads for sparse kernels (default 1)");

    std::string run_config, run_out, run_resume;
    auto* run = app.add_subcommand("run", "run a case configuration");
    run->add_option("config", run_config, "case configuration file")->required();
    run->add_option("--out", run_out, "output directory (overrides the config)");
    run->add_option("--resume", run_resume, "checkpoint file to resume from");

    std::string bench_config, bench_matrix;
    auto* bench = app.add_subcommand("bench", "compare cg / pcg-diag / pcg-sa / amg on the coupled matrix");
    bench->add_option("config", bench_config, "case configuration file");
    bench->add_option("--matrix", bench_matrix, "coordinate-format matrix dump instead of a case");

    std::string grid_config, grid_out;
    auto* gd = app.add_subcommand("grid-dump", "write the face coordinates of the case grid");
    gd->add_option("config", grid_config, "case configuration file")->required();
    gd->add_option("--out", grid_out, "output file (default grid.txt)");

    CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
    omp_set_num_threads(threads > 0 ? threads : 1);
#endif

    try {
        if (*run) {
            ibm::CaseConfig cfg;
            try {
                cfg = ibm::parse_config(run_config);
            } catch (const std::exception& e) {
                std::fprintf(stderr, "config error: %s\n", e.what());
                return 2;
            }
            ibm::RunOptions opts;
            opts.out_dir_override = run_out;
            opts.resume_from = run_resume;
            auto res = ibm::run_case(cfg, opts);
            if (res.exit_code != 0) std::fprintf(stderr, "run failed: %s\n", res.message.c_str());
            return res.exit_code;
        }
        if (*bench) {
            std::vector<ibm::BenchRow> rows;
            if (!bench_matrix.empty()) {
                auto m = ibm::SparseMatrix::load(bench_matrix);
                ibm::SolverParams p;
                p.max_iters = 20000;
                rows = ibm::solver_bench_matrix(m, -1, p, {});
            } else if (!bench_config.empty()) {
                ibm::CaseConfig cfg;
                try {
                    cfg = ibm::parse_config(bench_config);
                } catch (const std::exception& e) {
                    std::fprintf(stderr, "config error: %s\n", e.what());
                    return 2;
                }
                rows = ibm::solver_bench_case(cfg);
            } else {
                std::fprintf(stderr, "bench: need a config file or --matrix\n");
                return 2;
            }
            ibm::print_bench(rows, stdout);
            return 0;
        }
        if (*gd) {
            ibm::CaseConfig cfg;
            try {
                cfg = ibm::parse_config(grid_config);
            } catch (const std::exception& e) {
                std::fprintf(stderr, "config error: %s\n", e.what());
                return 2;
            }
            auto grid = ibm::build_stretched_grid(cfg.domain, cfg.uniform, cfg.h_min, cfg.ratio);
            grid.write_faces(grid_out.empty() ? "grid.txt" : grid_out);
            std::fprintf(stdout, "grid: %d x %d cells (%d unknowns)\n", grid.nx, grid.ny,
                         grid.n_q() + grid.n_p());
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
