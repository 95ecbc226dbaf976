#pragma once

#include <panopt/panoc.hpp>
#include <panopt/problem.hpp>
#include <panopt/prox.hpp>

#include <cmath>
#include <functional>
#include <memory>
#include <utility>

namespace panopt {

struct AlmParams {
    real_t sigma0       = 1;    ///< initial penalty, uniform
    real_t delta_growth = 10;   ///< Δ > 1
    real_t theta        = 0.25; ///< θ ∈ (0,1), violation decrease target
    real_t sigma_max    = 1e9;
    real_t y_max        = 1e9;  ///< multiplier box half-width for Π_Y
    real_t eps0         = 1;    ///< initial inner tolerance
    real_t eps_final    = 1e-3; ///< ε
    real_t delta_final  = 1e-3; ///< δ
    real_t rho_eps      = 0.1;  ///< inner tolerance shrink factor
    int max_outer       = 100;
    /// Scale σ0 by max(1,|f(x0)|)/max(1,½‖g(x0)−Π_D(g(x0))‖²) before starting.
    bool scale_sigma0   = false;
};

/// ẑ = Π_D(g(x) + Σ⁻¹y), the explicit minimizer over the slack variable.
inline vec eval_zhat(const vec &g_x, const vec &y, const vec &sigma,
                     const BoxSet &box_d) {
    return project(box_d, g_x + y.cwiseQuotient(sigma));
}

/// ŷ = Σ(g(x) + Σ⁻¹y − Π_D(g(x) + Σ⁻¹y)) = y + Σ(g(x) − ẑ).
inline vec eval_yhat(const vec &g_x, const vec &y, const vec &sigma,
                     const BoxSet &box_d) {
    vec w = g_x + y.cwiseQuotient(sigma);
    return sigma.cwiseProduct(w - project(box_d, w));
}

/// ψ_Σ(x; y) = f(x) + ½ dist²_Σ(g(x) + Σ⁻¹y, D); returns ẑ as byproduct.
inline std::pair<real_t, vec> eval_psi(const ProblemSpec &problem, const vec &x,
                                       const vec &y, const vec &sigma) {
    real_t fx = problem.eval_f(x);
    vec g_x   = problem.eval_g(x);
    vec w     = g_x + y.cwiseQuotient(sigma);
    vec zhat  = project(problem.box_d, w);
    vec d     = w - zhat;
    real_t psi = fx + real_t(0.5) * d.cwiseProduct(d).dot(sigma);
    return {psi, std::move(zhat)};
}

/// ∇ψ_Σ(x; y) = ∇f(x) + ∇g(x)ᵀŷ(x).
inline vec eval_grad_psi(const ProblemSpec &problem, const vec &x, const vec &y,
                         const vec &sigma) {
    vec g_x  = problem.eval_g(x);
    vec yhat = eval_yhat(g_x, y, sigma, problem.box_d);
    return problem.eval_grad_f(x) + problem.eval_grad_g_prod(x, yhat);
}

/// y⁺ = Π_{[−M,M]}(y + Σ(g(x) − ẑ)), the clamped ŷ. Shares eval_yhat's
/// arithmetic so the identity y⁺ = clamp(ŷ) holds bitwise.
inline vec update_multipliers(const vec &y, const vec &sigma, const vec &g_x,
                              const vec &zhat, real_t y_max) {
    vec w        = g_x + y.cwiseQuotient(sigma);
    vec proposed = sigma.cwiseProduct(w - zhat);
    return proposed.cwiseMax(-y_max).cwiseMin(y_max);
}

/// Penalty update: constraints whose violation did not shrink by the factor θ
/// get their penalty scaled by max(1, Δ|e_i|/‖e‖_∞), capped at σ_max. The
/// first call (no previous error available) leaves σ unchanged.
inline vec update_sigma(const vec &sigma, const vec &e_now, const vec &e_prev,
                        real_t theta, real_t delta_growth, real_t sigma_max,
                        bool first = false) {
    vec out      = sigma;
    real_t e_inf = e_now.lpNorm<Eigen::Infinity>();
    if (first || e_inf == 0)
        return out;
    for (index_t i = 0; i < sigma.size(); ++i) {
        if (std::abs(e_now[i]) > theta * std::abs(e_prev[i]))
            out[i] = std::min(sigma_max,
                              sigma[i] * std::max(real_t(1),
                                                  delta_growth *
                                                      std::abs(e_now[i]) / e_inf));
    }
    return out;
}

/// Inner smooth objective ψ_Σ(·; y) over the problem's box C, with fused
/// value-and-gradient evaluation so each inner iteration costs one evaluation
/// of each of f, ∇f, g and ∇g(x)ᵀv.
inline SmoothOracle make_alm_oracle(const ProblemSpec &problem, vec y,
                                    vec sigma) {
    SmoothOracle oracle;
    oracle.box      = problem.box_c;
    oracle.counters = &problem.counters;
    oracle.psi_fn   = [&problem, y, sigma](const vec &x) {
        return eval_psi(problem, x, y, sigma).first;
    };
    oracle.grad_fn = [&problem, y, sigma](const vec &x) {
        return eval_grad_psi(problem, x, y, sigma);
    };
    oracle.psi_grad_fn = [&problem, y, sigma](const vec &x) -> std::pair<real_t, vec> {
        real_t fx = problem.eval_f(x);
        vec g_x   = problem.eval_g(x);
        vec w     = g_x + y.cwiseQuotient(sigma);
        vec d     = w - project(problem.box_d, w);
        real_t psi = fx + real_t(0.5) * d.cwiseProduct(d).dot(sigma);
        vec yhat   = sigma.cwiseProduct(d);
        vec grad = problem.eval_grad_f(x) + problem.eval_grad_g_prod(x, yhat);
        return {psi, std::move(grad)};
    };
    return oracle;
}

using DirectionFactory = std::function<std::unique_ptr<DirectionProvider>()>;

struct AlmResult {
    vec x, y;
    SolveStatus status = SolveStatus::MaxOuterIter;
    int outer_iters    = 0;
    long inner_iters   = 0;
    EvalCounters counters;       ///< evaluations consumed by this solve
    real_t final_eps   = inf;    ///< inner residual achieved at the last solve
    real_t final_delta = inf;    ///< ‖g(x) − ẑ‖_∞ at the last iterate
    int forced_accepts = 0;
};

/// Outer augmented Lagrangian loop: repeatedly minimize ψ_Σ(·; y) over C with
/// the inner solver (warm-started from the previous iterate), update the
/// multipliers, grow the penalties of insufficiently improving constraints,
/// and tighten the inner tolerance until both ‖g(x) − ẑ‖_∞ ≤ δ and
/// ε^ν ≤ ε hold. The direction provider is rebuilt for every outer iteration
/// because ψ changes with (y, Σ).
inline AlmResult alm_solve(const ProblemSpec &problem, const vec &x0,
                           const vec &y0, const AlmParams &ap,
                           const PanocParams &pp_base,
                           const DirectionFactory &make_dir,
                           const PanocCallback &inner_callback = {}) {
    AlmResult res;
    EvalCounters before = problem.counters;
    res.x = x0;
    res.y = y0;

    real_t sigma0 = ap.sigma0;
    if (ap.scale_sigma0 && problem.m > 0) {
        real_t f0 = problem.eval_f(x0);
        vec g0    = problem.eval_g(x0);
        vec d0    = g0 - project(problem.box_d, g0);
        sigma0 *= std::max(real_t(1), std::abs(f0)) /
                  std::max(real_t(1), real_t(0.5) * d0.squaredNorm());
    }
    vec sigma  = vec::Constant(problem.m, sigma0);
    real_t eps = std::max(std::min(ap.eps0, real_t(1e10)), ap.eps_final);
    vec e_prev = vec::Zero(problem.m);
    bool first = true;

    if (problem.m == 0)
        eps = ap.eps_final;

    for (int nu = 1; nu <= ap.max_outer; ++nu) {
        res.outer_iters = nu;
        SmoothOracle oracle = make_alm_oracle(problem, res.y, sigma);
        PanocParams pp      = pp_base;
        pp.epsilon          = eps;
        auto dir            = make_dir();
        PanocResult inner   = panoc_solve(oracle, res.x, pp, *dir, inner_callback);
        res.x = inner.x;
        res.inner_iters += inner.iterations;
        res.forced_accepts += inner.forced_accepts;
        res.final_eps = inner.final_residual_inf;
        if (inner.status != SolveStatus::Converged) {
            res.status   = inner.status;
            res.counters = problem.counters - before;
            return res;
        }

        if (problem.m == 0) {
            res.final_delta = 0;
            res.status      = SolveStatus::Converged;
            res.counters    = problem.counters - before;
            return res;
        }

        vec g_x  = problem.eval_g(res.x);
        vec zhat = eval_zhat(g_x, res.y, sigma, problem.box_d);
        vec e    = g_x - zhat;
        res.y    = update_multipliers(res.y, sigma, g_x, zhat, ap.y_max);
        res.final_delta = e.lpNorm<Eigen::Infinity>();

        if (res.final_delta <= ap.delta_final && eps <= ap.eps_final) {
            res.status   = SolveStatus::Converged;
            res.counters = problem.counters - before;
            return res;
        }

        sigma  = update_sigma(sigma, e, e_prev, ap.theta, ap.delta_growth,
                              ap.sigma_max, first);
        e_prev = e;
        first  = false;
        eps    = std::max(ap.rho_eps * eps, ap.eps_final);
    }

    res.status   = SolveStatus::MaxOuterIter;
    res.counters = problem.counters - before;
    return res;
}

} // namespace panopt
