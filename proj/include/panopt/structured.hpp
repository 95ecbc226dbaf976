#pragma once

#include <panopt/lbfgs.hpp>
#include <panopt/panoc.hpp>
#include <panopt/prox.hpp>

#include <cmath>
#include <vector>

namespace panopt {

/// Partition of {0..n−1} into box constraints active after a gradient step
/// and their complement.
struct IndexSplit {
    std::vector<index_t> active;   ///< 𝒦(x)
    std::vector<index_t> inactive; ///< 𝒥(x)
};

/// i ∈ 𝒦 iff x_i − γ∇ψ(x)_i ≤ lo_i or up_i ≤ x_i − γ∇ψ(x)_i (non-strict).
inline IndexSplit split_indices(const vec &x, const vec &grad_psi_x,
                                real_t gamma, const BoxSet &box) {
    IndexSplit split;
    for (index_t i = 0; i < x.size(); ++i) {
        real_t step = x[i] - gamma * grad_psi_x[i];
        if (step <= box.lower[i] || box.upper[i] <= step)
            split.active.push_back(i);
        else
            split.inactive.push_back(i);
    }
    return split;
}

struct StructuredDirParams {
    bool include_hessian_vec = false;
    real_t fd_step           = std::sqrt(eps_mach);
};

/// Finite-difference estimate of the coupling term ∇²_{x_𝒥 x_𝒦}ψ(x)·q_𝒦,
/// restricted to the inactive set. q_k_padded carries q_𝒦 in the 𝒦 slots and
/// zeros elsewhere. Costs exactly one gradient evaluation per call.
inline vec fd_hessian_vec_term(const SmoothOracle &oracle, const vec &x,
                               const vec &grad_psi_x, const vec &q_k_padded,
                               const std::vector<index_t> &inactive,
                               real_t fd_step) {
    const auto nj = static_cast<index_t>(inactive.size());
    real_t qn     = q_k_padded.lpNorm<Eigen::Infinity>();
    real_t h = fd_step * (1 + x.lpNorm<Eigen::Infinity>()) /
               std::max(qn, eps_mach);
    if (!(h > 0) || !std::isfinite(h))
        return vec::Zero(nj);
    vec g2 = oracle.grad(x + h * q_k_padded);
    vec out(nj);
    for (index_t j = 0; j < nj; ++j) {
        index_t i = inactive[static_cast<size_t>(j)];
        out[j]    = (g2[i] - grad_psi_x[i]) / h;
    }
    return out;
}

/// Structured accelerator: active coordinates copy the proximal step,
/// inactive coordinates take a quasi-Newton step on ψ via masked L-BFGS,
///   q_𝒦 = p_𝒦,   q_𝒥 = H_𝒥𝒥 (−∇_{x_𝒥}ψ(x) − ∇²_{x_𝒥x_𝒦}ψ(x) q_𝒦).
/// Pairs are gradient-space (s = Δx, y = Δ∇ψ), approximating ∇²ψ, which is
/// independent of γ, so the buffer survives step-size changes.
class StructuredDirection : public DirectionProvider {
  public:
    StructuredDirection(index_t n, int memory, StructuredDirParams params = {})
        : buffer_{n, memory, LbfgsBuffer::Mode::Masked}, params_{params} {}

    void update(const vec &x_old, const vec &x_new, const vec &, const vec &,
                const vec &grad_old, const vec &grad_new, real_t,
                bool) override {
        buffer_.push(x_new - x_old, grad_new - grad_old);
    }

    bool compute(const SmoothOracle &oracle, const vec &x, const vec &p,
                 real_t gamma, const vec &grad_psi_x, vec &q) override {
        IndexSplit split = split_indices(x, grad_psi_x, gamma, oracle.box);
        if (split.inactive.empty()) {
            q = p;
            return true;
        }
        // Without curvature pairs the 𝒥-block would be an unscaled gradient
        // step, which the line search must then walk all the way back; decline
        // and let the solver take the proximal step instead.
        if (buffer_.count() == 0)
            return false;
        q = p; // fills q_𝒦 = p_𝒦; the 𝒥 slots are overwritten below
        const auto nj = static_cast<index_t>(split.inactive.size());
        vec rhs(nj);
        for (index_t j = 0; j < nj; ++j)
            rhs[j] = -grad_psi_x[split.inactive[static_cast<size_t>(j)]];
        if (params_.include_hessian_vec) {
            vec q_k_padded = vec::Zero(x.size());
            for (index_t i : split.active)
                q_k_padded[i] = p[i];
            vec hv = fd_hessian_vec_term(oracle, x, grad_psi_x, q_k_padded,
                                         split.inactive, params_.fd_step);
            if (!hv.allFinite()) {
                q = p;
                return true;
            }
            rhs -= hv;
        }
        vec qj = buffer_.apply_masked(rhs, split.inactive);
        for (index_t j = 0; j < nj; ++j)
            q[split.inactive[static_cast<size_t>(j)]] = qj[j];
        return true;
    }

    LbfgsBuffer &buffer() { return buffer_; }

  private:
    LbfgsBuffer buffer_;
    StructuredDirParams params_;
};

} // namespace panopt
