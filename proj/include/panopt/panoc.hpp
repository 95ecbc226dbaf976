#pragma once

#include <panopt/lbfgs.hpp>
#include <panopt/prox.hpp>
#include <panopt/types.hpp>

#include <cmath>
#include <functional>
#include <memory>
#include <utility>

namespace panopt {

enum class LineSearch { Original, Improved };

/// Pluggable accelerator producing the candidate step q from the current
/// prox-grad quantities. compute must not mutate solver iterates; returning
/// false falls back to q = p.
struct DirectionProvider {
    virtual ~DirectionProvider() = default;
    virtual void initialize(const vec & /*x0*/, const vec & /*grad0*/) {}
    /// Called once per accepted iterate, with the prox steps p at the shared
    /// step size gamma (the step size in effect after acceptance).
    virtual void update(const vec &x_old, const vec &x_new, const vec &p_old,
                        const vec &p_new, const vec &grad_old,
                        const vec &grad_new, real_t gamma,
                        bool step_size_changed) = 0;
    virtual bool compute(const SmoothOracle &oracle, const vec &x, const vec &p,
                         real_t gamma, const vec &grad_psi_x, vec &q) = 0;
};

struct PanocParams {
    int max_iter        = 1000;
    real_t epsilon      = 1e-5; ///< inner tolerance on ‖x − Π_C(x − ∇ψ)‖_∞
    real_t tau_min      = real_t(1) / 256;
    LineSearch line_search = LineSearch::Original;
    int max_ls_iter     = 20;
    real_t sigma_coeff  = real_t(0.1); ///< position of σ inside its interval
    real_t lipschitz_0  = 0;           ///< 0 → finite-difference estimate
    real_t gamma_min_factor = 1e-12;   ///< abort when γ < factor·γ_0
    int lbfgs_memory    = 10;
};

/// Per-iteration snapshot passed to the optional observer callback.
struct PanocIterationInfo {
    int k;
    real_t gamma_k;    ///< step size used for p^k and the RHS of the test
    real_t gamma_used; ///< step size of the accepted candidate's FBE
    real_t lipschitz;
    real_t sigma;
    real_t tau;
    real_t phi_x;      ///< φ_{γ_k}(x^k)
    real_t phi_next;   ///< φ_{γ_used}(x^{k+1})
    real_t residual_inf;
    bool forced;       ///< τ = 0 fallback accepted despite a failed test
    const vec &x, &p, &q, &x_next, &grad_psi_x;
};

struct PanocResult {
    vec x;
    SolveStatus status = SolveStatus::MaxIter;
    int iterations     = 0;
    real_t final_residual_inf = inf;
    int forced_accepts = 0;
};

using PanocCallback = std::function<void(const PanocIterationInfo &)>;

/// Inner solver for min_x ψ(x) + δ_C(x): proximal gradient steps blended with
/// accelerator steps through a backtracking search on the FBE. Original mode
/// tests the candidate's FBE at the current step size and adapts the step
/// size after acceptance; Improved mode adapts the step size at the candidate
/// first and tests against the FBE under the adapted step size, falling back
/// to the pure proximal step when τ drops below τ_min.
inline PanocResult panoc_solve(const SmoothOracle &oracle, const vec &x0,
                               const PanocParams &params, DirectionProvider &dir,
                               const PanocCallback &callback = {}) {
    PanocResult res;
    const bool improved = params.line_search == LineSearch::Improved;

    vec x = project(oracle.box, x0);
    auto [psi_x, grad_x] = oracle.psi_grad(x);
    if (!std::isfinite(psi_x) || !grad_x.allFinite()) {
        res.x      = x;
        res.status = SolveStatus::NotFinite;
        return res;
    }

    real_t L = params.lipschitz_0 > 0
                   ? params.lipschitz_0
                   : estimate_initial_lipschitz(oracle, x, &grad_x);
    real_t gamma           = real_t(0.95) / L;
    const real_t gamma_min = params.gamma_min_factor * gamma;

    auto ss = update_step_size(oracle, x, psi_x, grad_x, gamma, L,
                               params.sigma_coeff, gamma_min);
    if (!ss.ok) {
        res.x      = x;
        res.status = SolveStatus::NotFinite;
        return res;
    }
    gamma        = ss.gamma;
    L            = ss.lipschitz;
    real_t sigma = ss.sigma;
    vec x_hat    = std::move(ss.x_hat);
    vec p        = std::move(ss.p);

    dir.initialize(x, grad_x);
    vec q(x.size());

    for (int k = 0; k < params.max_iter; ++k) {
        real_t r_inf = (x - project(oracle.box, x - grad_x)).lpNorm<Eigen::Infinity>();
        if (r_inf <= params.epsilon) {
            res.x                  = x;
            res.status             = SolveStatus::Converged;
            res.iterations         = k;
            res.final_residual_inf = r_inf;
            return res;
        }

        if (!dir.compute(oracle, x, p, gamma, grad_x, q) || !q.allFinite())
            q = p;

        const real_t phi_x     = fbe_value(x, psi_x, grad_x, x_hat, gamma);
        const real_t threshold = phi_x - sigma * p.squaredNorm();

        real_t tau = 1;
        vec xc, grad_c, xhat_c, p_c;
        real_t psi_c = 0, phi_c = 0;
        real_t gamma_c = gamma, L_c = L, sigma_c = sigma;
        bool accepted = false, forced = false, fatal = false;

        for (int ls = 0; ls <= params.max_ls_iter; ++ls) {
            if (ls == params.max_ls_iter || (improved && tau < params.tau_min))
                tau = 0;
            xc = tau == 1 ? vec(x + q)
               : tau == 0 ? x_hat
                          : vec(x + (1 - tau) * p + tau * q);
            std::tie(psi_c, grad_c) = oracle.psi_grad(xc);
            bool fin = std::isfinite(psi_c) && grad_c.allFinite();
            if (!fin) {
                if (tau == 0) {
                    fatal = true;
                    break;
                }
                tau /= 2;
                continue;
            }
            if (improved) {
                // Probe the step size at the candidate; rejected candidates
                // discard the probed (γ, L).
                auto sc = update_step_size(oracle, xc, psi_c, grad_c, gamma, L,
                                           params.sigma_coeff, gamma_min);
                if (!sc.ok) {
                    if (tau == 0) {
                        fatal = true;
                        break;
                    }
                    tau /= 2;
                    continue;
                }
                gamma_c = sc.gamma;
                L_c     = sc.lipschitz;
                sigma_c = sc.sigma;
                xhat_c  = std::move(sc.x_hat);
                p_c     = std::move(sc.p);
                phi_c   = fbe_value(xc, psi_c, grad_c, xhat_c, gamma_c);
            } else {
                std::tie(xhat_c, p_c) = prox_grad_step(oracle.box, xc, grad_c, gamma);
                phi_c = fbe_value(xc, psi_c, grad_c, xhat_c, gamma);
            }
            if (tau == 0) {
                accepted = true;
                forced   = phi_c > threshold;
                break;
            }
            if (phi_c <= threshold) {
                accepted = true;
                break;
            }
            tau /= 2;
        }

        if (fatal || !accepted) {
            res.x                  = x;
            res.status             = SolveStatus::NotFinite;
            res.iterations         = k;
            res.final_residual_inf = r_inf;
            return res;
        }

        bool step_size_changed;
        if (!improved) {
            auto sc = update_step_size(oracle, xc, psi_c, grad_c, gamma, L,
                                       params.sigma_coeff, gamma_min);
            if (!sc.ok) {
                res.x                  = x;
                res.status             = SolveStatus::NotFinite;
                res.iterations         = k;
                res.final_residual_inf = r_inf;
                return res;
            }
            step_size_changed = sc.gamma != gamma;
            gamma_c           = sc.gamma;
            L_c               = sc.lipschitz;
            sigma_c           = sc.sigma;
            xhat_c            = std::move(sc.x_hat);
            p_c               = std::move(sc.p);
        } else {
            step_size_changed = gamma_c != gamma;
        }

        dir.update(x, xc, p, p_c, grad_x, grad_c, gamma_c, step_size_changed);

        if (callback)
            callback({k, gamma, improved ? gamma_c : gamma, L, sigma, tau, phi_x,
                      phi_c, r_inf, forced, x, p, q, xc, grad_x});

        if (forced)
            ++res.forced_accepts;
        x      = std::move(xc);
        psi_x  = psi_c;
        grad_x = std::move(grad_c);
        x_hat  = std::move(xhat_c);
        p      = std::move(p_c);
        gamma  = gamma_c;
        L      = L_c;
        sigma  = sigma_c;
    }

    res.x      = x;
    res.status = SolveStatus::MaxIter;
    res.iterations = params.max_iter;
    res.final_residual_inf =
        (x - project(oracle.box, x - grad_x)).lpNorm<Eigen::Infinity>();
    return res;
}

/// Original-PANOC accelerator: L-BFGS on the fixed-point residual. Pairs are
/// s = Δx and y = p_old − p_new (= γ·ΔR_γ at fixed γ), so applying the
/// estimate directly to p yields the step in x. Pairs collected under a
/// different γ approximate a different residual map, so the buffer is reset
/// whenever the step size changes.
class LbfgsDirection : public DirectionProvider {
  public:
    LbfgsDirection(index_t n, int memory)
        : buffer_{n, memory, LbfgsBuffer::Mode::Standard} {}

    void update(const vec &x_old, const vec &x_new, const vec &p_old,
                const vec &p_new, const vec &, const vec &, real_t,
                bool step_size_changed) override {
        if (step_size_changed) {
            buffer_.reset();
            return;
        }
        buffer_.push(x_new - x_old, p_old - p_new);
    }

    bool compute(const SmoothOracle &, const vec &, const vec &p, real_t,
                 const vec &, vec &q) override {
        q = buffer_.apply(p);
        return true;
    }

    LbfgsBuffer &buffer() { return buffer_; }

  private:
    LbfgsBuffer buffer_;
};

} // namespace panopt
