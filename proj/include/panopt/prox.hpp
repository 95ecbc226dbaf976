#pragma once

#include <panopt/box.hpp>
#include <panopt/types.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>

namespace panopt {

/// Smooth part ψ of the inner problem min_x ψ(x) + δ_C(x), with its gradient.
/// The fused psi_grad_fn hook lets the provider share work between ψ and ∇ψ;
/// when absent, both callbacks are invoked.
struct SmoothOracle {
    BoxSet box;
    std::function<real_t(const vec &)> psi_fn;
    std::function<vec(const vec &)> grad_fn;
    std::function<std::pair<real_t, vec>(const vec &)> psi_grad_fn;
    EvalCounters *counters = nullptr;

    real_t psi(const vec &x) const {
        if (counters)
            ++counters->psi_evals;
        return psi_fn(x);
    }
    vec grad(const vec &x) const {
        if (counters)
            ++counters->grad_psi_evals;
        return grad_fn(x);
    }
    std::pair<real_t, vec> psi_grad(const vec &x) const {
        if (counters) {
            ++counters->psi_evals;
            ++counters->grad_psi_evals;
        }
        if (psi_grad_fn)
            return psi_grad_fn(x);
        return {psi_fn(x), grad_fn(x)};
    }
};

/// Projected gradient step: x̂ = Π_C(x − γ∇ψ(x)), p = x̂ − x.
inline std::pair<vec, vec> prox_grad_step(const BoxSet &box, const vec &x,
                                          const vec &grad_psi_x, real_t gamma) {
    vec x_hat = project(box, x - gamma * grad_psi_x);
    vec p     = x_hat - x;
    return {std::move(x_hat), std::move(p)};
}

/// R_γ(x) = (x − T_γ(x))/γ = −p/γ.
inline vec fixed_point_residual(const vec &p, real_t gamma) { return -p / gamma; }

/// FBE value with the prox-grad quantities already at hand.
/// φ_γ(x) = ψ(x) − (γ/2)‖∇ψ(x)‖² + (1/2γ)‖x − γ∇ψ(x) − x̂‖².
inline real_t fbe_value(const vec &x, real_t psi_x, const vec &grad_psi_x,
                        const vec &x_hat, real_t gamma) {
    real_t dist_sq = (x - gamma * grad_psi_x - x_hat).squaredNorm();
    return psi_x - real_t(0.5) * gamma * grad_psi_x.squaredNorm() +
           dist_sq / (2 * gamma);
}

/// Forward-backward envelope of ψ + δ_C at x.
inline real_t eval_fbe(const SmoothOracle &oracle, const vec &x, real_t psi_x,
                       const vec &grad_psi_x, real_t gamma) {
    auto [x_hat, p] = prox_grad_step(oracle.box, x, grad_psi_x, gamma);
    return fbe_value(x, psi_x, grad_psi_x, x_hat, gamma);
}

/// Descent-lemma test ψ(x̂) ≤ ψ(x) + ∇ψ(x)ᵀp + (L/2)‖p‖², with a small
/// relative slack so rounding at the equality boundary cannot force an
/// infinite step-size halving loop.
inline bool qub_holds(real_t psi_hat, real_t psi_x, const vec &grad_psi_x,
                      const vec &p, real_t lipschitz) {
    real_t rhs = psi_x + grad_psi_x.dot(p) +
                 real_t(0.5) * lipschitz * p.squaredNorm() +
                 10 * eps_mach * std::max(real_t(1), std::abs(psi_x));
    return psi_hat <= rhs;
}

/// σ ∈ (0, (1−γL)/(2γ)), placed strictly inside the interval.
inline real_t sigma_from(real_t gamma, real_t lipschitz, real_t sigma_coeff) {
    return sigma_coeff * (1 - gamma * lipschitz) / (2 * gamma);
}

struct StepSizeResult {
    real_t gamma = 0, lipschitz = 0, sigma = 0;
    vec x_hat, p;
    real_t psi_hat = 0;
    bool ok = false; ///< false when γ fell below gamma_min
};

/// Halve γ and double L until the quadratic upper bound holds at x.
/// Returns the refreshed prox-grad quantities under the final γ.
inline StepSizeResult update_step_size(const SmoothOracle &oracle, const vec &x,
                                       real_t psi_x, const vec &grad_psi_x,
                                       real_t gamma, real_t lipschitz,
                                       real_t sigma_coeff, real_t gamma_min) {
    StepSizeResult r;
    std::tie(r.x_hat, r.p) = prox_grad_step(oracle.box, x, grad_psi_x, gamma);
    r.psi_hat = oracle.psi(r.x_hat);
    while (!(std::isfinite(r.psi_hat) &&
             qub_holds(r.psi_hat, psi_x, grad_psi_x, r.p, lipschitz))) {
        gamma /= 2;
        lipschitz *= 2;
        if (gamma < gamma_min)
            return r; // ok stays false
        std::tie(r.x_hat, r.p) = prox_grad_step(oracle.box, x, grad_psi_x, gamma);
        r.psi_hat = oracle.psi(r.x_hat);
    }
    r.gamma     = gamma;
    r.lipschitz = lipschitz;
    r.sigma     = sigma_from(gamma, lipschitz, sigma_coeff);
    r.ok        = true;
    return r;
}

/// Forward-difference estimate of the local Lipschitz constant of ∇ψ,
/// clamped to [1e−10, 1e10]; falls back to 1 when the gradients coincide.
/// Pass grad0 = ∇ψ(x0) when already available to save one evaluation.
inline real_t estimate_initial_lipschitz(const SmoothOracle &oracle,
                                         const vec &x0,
                                         const vec *grad0 = nullptr) {
    const real_t delta = 1e-4;
    vec d  = delta * x0.array().abs().max(real_t(1)).matrix();
    vec g0 = grad0 ? *grad0 : oracle.grad(x0);
    vec g1 = oracle.grad(x0 + d);
    real_t num = (g1 - g0).norm();
    if (num == 0)
        return 1;
    real_t L = num / d.norm();
    return std::clamp(L, real_t(1e-10), real_t(1e10));
}

} // namespace panopt
