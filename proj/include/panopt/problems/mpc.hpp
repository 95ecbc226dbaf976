#pragma once

#include <panopt/problems/chain.hpp>
#include <panopt/variants.hpp>

#include <chrono>
#include <vector>

namespace panopt::problems {

struct MpcStepReport {
    int step = 0;
    SolveStatus status = SolveStatus::MaxOuterIter;
    int outer_iters    = 0;
    long inner_iters   = 0;
    EvalCounters counters;
    real_t wall_time_s = 0;
    real_t final_eps   = inf;
    real_t final_delta = inf;
};

/// Receding-horizon simulation of the hanging-chain controller. The plant is
/// perturbed by u = (−0.5, 0.5, 0.5) for three steps before the controller
/// takes over. Cold mode zero-initializes inputs and multipliers each step;
/// warm mode shifts the previous solution by one time step (final block
/// repeated) and the multipliers per time-step block (tail zero-filled).
/// On solver failure the step is recorded and the plant receives u = 0.
inline std::vector<MpcStepReport>
mpc_simulate(const ChainParams &cp, SolverVariant variant, const AlmParams &ap,
             const PanocParams &pp, int n_steps, bool warm_start) {
    using clock = std::chrono::steady_clock;
    const int N        = cp.horizon;
    const int per_step = cp.n_balls + 1;

    vec state = chain_initial_state(cp);
    vec u_perturb(3);
    u_perturb << -0.5, 0.5, 0.5;
    for (int k = 0; k < 3; ++k)
        state = chain_step_rk4(cp, state, u_perturb);

    vec u_init = vec::Zero(3 * N);
    vec y_init = vec::Zero(static_cast<index_t>(N) * per_step);

    std::vector<MpcStepReport> reports;
    reports.reserve(static_cast<size_t>(n_steps));
    for (int step = 0; step < n_steps; ++step) {
        ProblemSpec prob = chain_ocp(cp, state);
        auto t0 = clock::now();
        AlmResult r = solve_with_variant(prob, u_init, y_init, ap, pp, variant);
        auto t1 = clock::now();

        MpcStepReport rep;
        rep.step        = step;
        rep.status      = r.status;
        rep.outer_iters = r.outer_iters;
        rep.inner_iters = r.inner_iters;
        rep.counters    = r.counters;
        rep.wall_time_s = std::chrono::duration<real_t>(t1 - t0).count();
        rep.final_eps   = r.final_eps;
        rep.final_delta = r.final_delta;
        reports.push_back(rep);

        vec u_applied = r.status == SolveStatus::Converged
                            ? vec(r.x.segment<3>(0))
                            : vec(vec::Zero(3));
        state = chain_step_rk4(cp, state, u_applied);

        if (warm_start && r.status == SolveStatus::Converged) {
            u_init.head(3 * (N - 1)) = r.x.tail(3 * (N - 1));
            u_init.tail<3>()         = r.x.tail<3>();
            y_init.head(static_cast<index_t>(N - 1) * per_step) =
                r.y.tail(static_cast<index_t>(N - 1) * per_step);
            y_init.tail(per_step).setZero();
        } else {
            u_init.setZero();
            y_init.setZero();
        }
    }
    return reports;
}

} // namespace panopt::problems
