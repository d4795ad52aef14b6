/// \file stepper.hpp
/// \brief Time advancement: explicit Adams-Bashforth convection,
///        Crank-Nicolson diffusion, and the three-stage factorized solve with
///        preconditioner reuse for moving bodies.
#pragma once

#include <cmath>
#include <chrono>
#include <memory>
#include <string>
#include <vector>

#include "ibm/amg.hpp"
#include "ibm/boundary.hpp"
#include "ibm/krylov.hpp"
#include "ibm/operators.hpp"

namespace ibm {

/// Convection term N(q) of each momentum equation, conservative (divergence)
/// form with central interpolation, evaluated at all interior velocity nodes
/// with boundary values substituted. Returned in the scaled q-equation units.
inline std::vector<double> compute_convection(const StaggeredGrid& g, const std::vector<double>& q,
                                              const BoundaryState& s) {
    const int nx = g.nx, ny = g.ny;
    std::vector<double> conv(static_cast<size_t>(g.n_q()), 0.0);

    auto u_at = [&](int i_f, int j) {
        if (i_f == 0) return s.left_u[static_cast<size_t>(j)];
        if (i_f == nx) return s.right_u[static_cast<size_t>(j)];
        return q[static_cast<size_t>(g.u_id(i_f, j))] / g.dy[static_cast<size_t>(j)];
    };
    auto v_at = [&](int i, int j_f) {
        if (j_f == 0) return s.bottom_v[static_cast<size_t>(i)];
        if (j_f == ny) return s.top_v[static_cast<size_t>(i)];
        return q[static_cast<size_t>(g.v_id(i, j_f))] / g.dx[static_cast<size_t>(i)];
    };

    // u momentum: d(u^2)/dx + d(uv)/dy at (x_f[i_f], y_c[j])
#pragma omp parallel for schedule(static)
    for (int j = 0; j < ny; ++j) {
        for (int i_f = 1; i_f < nx; ++i_f) {
            const double uc_w = 0.5 * (u_at(i_f - 1, j) + u_at(i_f, j));
            const double uc_e = 0.5 * (u_at(i_f, j) + u_at(i_f + 1, j));
            const double ddx = (uc_e * uc_e - uc_w * uc_w) / g.del_x[static_cast<size_t>(i_f) - 1];

            auto uv_corner = [&](int jf) {
                double u_cor, v_cor;
                const double wx = 0.5 * g.dx[static_cast<size_t>(i_f) - 1] / g.del_x[static_cast<size_t>(i_f) - 1];
                if (jf == 0) {
                    u_cor = s.bottom_u[static_cast<size_t>(i_f) - 1];
                    v_cor = (1.0 - wx) * s.bottom_v[static_cast<size_t>(i_f) - 1] + wx * s.bottom_v[static_cast<size_t>(i_f)];
                } else if (jf == ny) {
                    u_cor = s.top_u[static_cast<size_t>(i_f) - 1];
                    v_cor = (1.0 - wx) * s.top_v[static_cast<size_t>(i_f) - 1] + wx * s.top_v[static_cast<size_t>(i_f)];
                } else {
                    const double wy = 0.5 * g.dy[static_cast<size_t>(jf) - 1] / g.del_y[static_cast<size_t>(jf) - 1];
                    u_cor = (1.0 - wy) * u_at(i_f, jf - 1) + wy * u_at(i_f, jf);
                    v_cor = (1.0 - wx) * v_at(i_f - 1, jf) + wx * v_at(i_f, jf);
                }
                return u_cor * v_cor;
            };
            const double ddy = (uv_corner(j + 1) - uv_corner(j)) / g.dy[static_cast<size_t>(j)];
            conv[static_cast<size_t>(g.u_id(i_f, j))] = g.del_x[static_cast<size_t>(i_f) - 1] * (ddx + ddy);
        }
    }

    // v momentum: d(uv)/dx + d(v^2)/dy at (x_c[i], y_f[j_f])
#pragma omp parallel for schedule(static)
    for (int j_f = 1; j_f < ny; ++j_f) {
        for (int i = 0; i < nx; ++i) {
            const double vc_s = 0.5 * (v_at(i, j_f - 1) + v_at(i, j_f));
            const double vc_n = 0.5 * (v_at(i, j_f) + v_at(i, j_f + 1));
            const double ddy = (vc_n * vc_n - vc_s * vc_s) / g.del_y[static_cast<size_t>(j_f) - 1];

            auto uv_corner = [&](int ic) {
                double u_cor, v_cor;
                const double wy = 0.5 * g.dy[static_cast<size_t>(j_f) - 1] / g.del_y[static_cast<size_t>(j_f) - 1];
                if (ic == 0) {
                    v_cor = s.left_v[static_cast<size_t>(j_f) - 1];
                    u_cor = (1.0 - wy) * s.left_u[static_cast<size_t>(j_f) - 1] + wy * s.left_u[static_cast<size_t>(j_f)];
                } else if (ic == nx) {
                    v_cor = s.right_v[static_cast<size_t>(j_f) - 1];
                    u_cor = (1.0 - wy) * s.right_u[static_cast<size_t>(j_f) - 1] + wy * s.right_u[static_cast<size_t>(j_f)];
                } else {
                    const double wx = 0.5 * g.dx[static_cast<size_t>(ic) - 1] / g.del_x[static_cast<size_t>(ic) - 1];
                    v_cor = (1.0 - wx) * v_at(ic - 1, j_f) + wx * v_at(ic, j_f);
                    u_cor = (1.0 - wy) * u_at(ic, j_f - 1) + wy * u_at(ic, j_f);
                }
                return u_cor * v_cor;
            };
            const double ddx = (uv_corner(i + 1) - uv_corner(i)) / g.dx[static_cast<size_t>(i)];
            conv[static_cast<size_t>(g.v_id(i, j_f))] = g.del_y[static_cast<size_t>(j_f) - 1] * (ddx + ddy);
        }
    }
    return conv;
}

struct FlowState {
    std::vector<double> q;           // momentum fluxes
    std::vector<double> conv_prev;   // convection term at the previous step
    std::vector<double> phi;         // pressure variable
    std::vector<double> f_tilde;     // transformed boundary forces
    std::vector<double> lambda;      // (phi, f_tilde)
    double t = 0.0;
    int step_index = 0;
    bool have_conv_prev = false;
};

struct SteppingParams {
    double dt = 0.0;
    int n_order = 1;
    int n_pc = 2;                    // rebuild the SA hierarchy every n_pc steps (moving bodies)
    bool force_rebuild = false;      // rebuild every step regardless (reference path)
    int slice_rows = 0;              // row-block size of the triple product; 0 = full
    SolverParams solve1;
    SolverParams solve2;
    SaOptions sa;

    void validate() const {
        if (dt <= 0.0) throw std::invalid_argument("stepping: dt must be positive");
        if (n_pc < 1) throw std::invalid_argument("stepping: n_pc must be >= 1");
        solve1.validate();
        solve2.validate();
    }
};

struct StepReport {
    bool ok = true;
    std::string message;
    int solve1_iters = 0, solve2_iters = 0;
    double solve1_res = 0.0, solve2_res = 0.0;
    double div_residual = 0.0;       // ||D q - bc2|| / max(1, ||bc2||)
    double noslip_residual = 0.0;    // ||E q - u_B||_inf / max(1, ||u_B||_inf)
    bool rebuilt_hierarchy = false;
    bool rebuilt_operators = false;
    double bc_cfl = 0.0;
    // phase timings in seconds, for the run summary
    double t_assembly = 0.0;         // operator refresh for moving bodies
    double t_precond = 0.0;          // hierarchy rebuild
    double t_explicit = 0.0;         // bc update, convection, rhs
    double t_solve1 = 0.0;
    double t_solve2 = 0.0;
    double t_projection = 0.0;
};

/// r1 of the momentum solve: (M/dt + (nu/2)L) q^n plus the viscous boundary
/// terms of both time levels and the Adams-Bashforth convection combination
/// (forward Euler bootstrap on the first step).
inline std::vector<double> compute_rhs1(const OperatorSet& ops, const std::vector<double>& q,
                                        const std::vector<double>& conv,
                                        const std::vector<double>& conv_prev, bool have_prev,
                                        const std::vector<double>& bcv_n,
                                        const std::vector<double>& bcv_np1) {
    const size_t n = q.size();
    std::vector<double> r1(n);
    ops.L.spmv_into(q.data(), r1.data());
    const double c1 = have_prev ? 1.5 : 1.0;
    const double c2 = have_prev ? 0.5 : 0.0;
    for (size_t i = 0; i < n; ++i) {
        r1[i] = ops.M[i] / ops.dt * q[i] + 0.5 * ops.nu * (r1[i] + bcv_n[i] + bcv_np1[i]) - c1 * conv[i];
        if (c2 != 0.0) r1[i] += c2 * conv_prev[i];
    }
    return r1;
}

/// Owns the operators, boundary values, body motion and the preconditioner
/// hierarchy; advances the flow one step at a time. Not reentrant.
class Stepper {
public:
    Stepper(const StaggeredGrid& grid, std::vector<LagrangianBody> bodies, BcSpec bc,
            double nu, SteppingParams params, double u0 = 0.0, double v0 = 0.0)
        : g_(grid), bodies_(std::move(bodies)), bc_(bc), nu_(nu), params_(params) {
        params_.validate();
        for (auto& b : bodies_) b.move_to(0.0);
        ops_ = assemble_operators(g_, bodies_, params_.dt, nu_, params_.n_order, 0, params_.slice_rows);
        geom_static_after_ = 0.0;
        for (const auto& b : bodies_) geom_static_after_ = std::max(geom_static_after_, b.static_after());
        params_.sa.keep_fine_tail = 2 * ops_.n_b;
        hier_ = build_sa_hierarchy(ops_.lhs2, params_.sa);
        hier_.built_at_step = 0;

        bstate_ = BoundaryState::initial(g_, bc_);
        state_.q.assign(static_cast<size_t>(g_.n_q()), 0.0);
        for (int j = 0; j < g_.ny; ++j)
            for (int i_f = 1; i_f < g_.nx; ++i_f)
                state_.q[static_cast<size_t>(g_.u_id(i_f, j))] = u0 * g_.dy[static_cast<size_t>(j)];
        for (int j_f = 1; j_f < g_.ny; ++j_f)
            for (int i = 0; i < g_.nx; ++i)
                state_.q[static_cast<size_t>(g_.v_id(i, j_f))] = v0 * g_.dx[static_cast<size_t>(i)];
        state_.lambda.assign(static_cast<size_t>(ops_.n_lambda()), 0.0);
        state_.phi.assign(static_cast<size_t>(g_.n_p()), 0.0);
        state_.f_tilde.assign(static_cast<size_t>(2 * ops_.n_b), 0.0);
        state_.conv_prev.assign(static_cast<size_t>(g_.n_q()), 0.0);
    }

    const FlowState& state() const { return state_; }
    FlowState& state() { return state_; }
    const OperatorSet& ops() const { return ops_; }
    const StaggeredGrid& grid() const { return g_; }
    const BoundaryState& boundary() const { return bstate_; }
    BoundaryState& boundary() { return bstate_; }
    const std::vector<LagrangianBody>& bodies() const { return bodies_; }
    const SaHierarchy& hierarchy() const { return hier_; }
    const BcSpec& bc_spec() const { return bc_; }
    double viscosity() const { return nu_; }
    const SteppingParams& params() const { return params_; }

    /// After an external state restore: bring body positions, operators and
    /// the preconditioner hierarchy in line with the restored time. Resumes
    /// are field-exact once the geometry is stationary (the hierarchy is
    /// rebuilt from the same frozen matrix); during a moving phase they agree
    /// with an uninterrupted run to solver tolerance only.
    void sync_bodies_to_time() {
        for (auto& b : bodies_) b.move_to(state_.t);
        if (geom_static_after_ > 0.0) {
            refresh_body_operators(ops_, g_, bodies_);
            hier_ = build_sa_hierarchy(ops_.lhs2, params_.sa);
            hier_.built_at_step = state_.step_index;
        }
    }

    /// Velocity interpolated to body points under the current state.
    std::vector<double> body_slip() const {
        std::vector<double> eq = ops_.E.spmv(state_.q);
        const std::vector<double> ub = body_velocity_vector(bodies_);
        for (size_t i = 0; i < eq.size(); ++i) eq[i] -= ub[i];
        return eq;
    }

    StepReport advance() {
        using clock = std::chrono::steady_clock;
        auto tic = clock::now();
        auto toc = [&tic]() {
            const auto now = clock::now();
            const double s = std::chrono::duration<double>(now - tic).count();
            tic = now;
            return s;
        };

        StepReport rep;
        const double t_new = state_.t + params_.dt;

        // body kinematics at t^{n+1}; operators follow the new positions
        const bool geometry_moving = state_.t < geom_static_after_;
        for (auto& b : bodies_) b.move_to(t_new);
        if (geometry_moving) {
            try {
                refresh_body_operators(ops_, g_, bodies_);
            } catch (const std::exception& e) {
                rep.ok = false;
                rep.message = e.what();
                return rep;
            }
            rep.rebuilt_operators = true;
            rep.t_assembly = toc();
            // rebuild the hierarchy on the policy interval, and once more on
            // the step where the geometry freezes for good
            const bool freezing = t_new >= geom_static_after_;
            if (params_.force_rebuild || freezing || state_.step_index % params_.n_pc == 0) {
                hier_ = build_sa_hierarchy(ops_.lhs2, params_.sa);
                hier_.built_at_step = state_.step_index;
                rep.rebuilt_hierarchy = true;
                rep.t_precond = toc();
            }
        }

        tic = clock::now();
        // boundary values at t^n and t^{n+1}
        const BoundaryState bstate_n = bstate_;
        const BcUpdateReport bcrep = apply_velocity_bcs(g_, bc_, state_.q, bstate_, params_.dt);
        rep.bc_cfl = bcrep.max_cfl;

        const std::vector<double> conv = compute_convection(g_, state_.q, bstate_n);
        const std::vector<double> bcv_n = viscous_bc_vector(ops_, bstate_n, g_.n_q());
        const std::vector<double> bcv_np1 = viscous_bc_vector(ops_, bstate_, g_.n_q());
        const std::vector<double> r1 = compute_rhs1(ops_, state_.q, conv, state_.conv_prev,
                                                    state_.have_conv_prev, bcv_n, bcv_np1);
        rep.t_explicit = toc();

        // stage 1: A q* = r1
        DiagonalPreconditioner diag1(ops_.A);
        SolveResult s1 = pcg(ops_.A, r1, state_.q, diag1, params_.solve1);
        rep.t_solve1 = toc();
        rep.solve1_iters = s1.iterations;
        rep.solve1_res = s1.rel_residual;
        if (!s1.converged()) {
            rep.ok = false;
            rep.message = "momentum solve did not converge (rel residual " +
                          std::to_string(s1.rel_residual) + ")";
            return rep;
        }

        // stage 2: Q^T B^N Q lambda = Q^T q* - r2, r2 = (-bc2, u_B)
        const std::vector<double> bc2 = make_bc2(g_, bstate_);
        const std::vector<double> ub = body_velocity_vector(bodies_);
        std::vector<double> rhs2 = ops_.QT.spmv(s1.x);
        const int np = g_.n_p();
        for (int i = 0; i < np; ++i) rhs2[static_cast<size_t>(i)] += bc2[static_cast<size_t>(i)];
        for (size_t i = 0; i < ub.size(); ++i) rhs2[static_cast<size_t>(np) + i] -= ub[i];
        rhs2[static_cast<size_t>(ops_.pin_index)] = 0.0;

        SaPreconditioner sa_pc(hier_);
        SolveResult s2 = pcg(ops_.lhs2, rhs2, state_.lambda, sa_pc, params_.solve2);
        rep.solve2_iters = s2.iterations;
        rep.solve2_res = s2.rel_residual;
        rep.t_solve2 = toc();
        if (!s2.converged()) {
            rep.ok = false;
            rep.message = "coupled solve did not converge (rel residual " +
                          std::to_string(s2.rel_residual) + ")";
            return rep;
        }

        // stage 3: projection as a pair of matrix-vector products (B^N Q is never formed)
        const std::vector<double> y = ops_.Q.spmv(s2.x);
        std::vector<double> corr(y.size());
        ops_.BN.spmv_into(y.data(), corr.data());
        std::vector<double> q_new = s1.x;
        for (size_t i = 0; i < q_new.size(); ++i) q_new[i] -= corr[i];
        rep.t_projection = toc();

        for (double v : q_new)
            if (!std::isfinite(v)) {
                rep.ok = false;
                rep.message = "NaN/Inf detected in the velocity field";
                return rep;
            }

        // step invariants: discrete divergence and no-slip to solver accuracy
        const std::vector<double> qtq = ops_.QT.spmv(q_new);
        double div2 = 0.0;
        for (int i = 0; i < np; ++i) {
            const double r = -qtq[static_cast<size_t>(i)] - bc2[static_cast<size_t>(i)];
            div2 += r * r;
        }
        double bc2n = 0.0;
        for (int i = 0; i < np; ++i) bc2n += bc2[static_cast<size_t>(i)] * bc2[static_cast<size_t>(i)];
        rep.div_residual = std::sqrt(div2) / std::max(1.0, std::sqrt(bc2n));
        double slip = 0.0, ubmax = 0.0;
        for (size_t i = 0; i < ub.size(); ++i) {
            slip = std::max(slip, std::fabs(qtq[static_cast<size_t>(np) + i] - ub[i]));
            ubmax = std::max(ubmax, std::fabs(ub[i]));
        }
        rep.noslip_residual = slip / std::max(1.0, ubmax);

        state_.q = std::move(q_new);
        state_.conv_prev = conv;
        state_.have_conv_prev = true;
        state_.lambda = s2.x;
        state_.phi.assign(s2.x.begin(), s2.x.begin() + np);
        state_.f_tilde.assign(s2.x.begin() + np, s2.x.end());
        state_.t = t_new;
        ++state_.step_index;
        return rep;
    }

private:
    const StaggeredGrid& g_;
    std::vector<LagrangianBody> bodies_;
    BcSpec bc_;
    double nu_;
    SteppingParams params_;
    OperatorSet ops_;
    SaHierarchy hier_;
    FlowState state_;
    BoundaryState bstate_;
    double geom_static_after_ = 0.0;
};

} // namespace ibm
