#pragma once

#include <panopt/box.hpp>
#include <panopt/types.hpp>

#include <functional>
#include <utility>

namespace panopt {

/// A box-constrained nonlinear program
///
///   minimize f(x)  subject to  x ∈ C,  g(x) ∈ D,
///
/// with analytic gradients supplied through callbacks. The Jacobian of g is
/// only ever needed as the adjoint product ∇g(x)ᵀv. All evaluations go through
/// the counted eval_* wrappers; a ProblemSpec instance is used by one solver
/// at a time.
struct ProblemSpec {
    index_t n = 0; ///< decision dimension
    index_t m = 0; ///< constraint dimension
    BoxSet box_c;  ///< bounds on x (dimension n)
    BoxSet box_d;  ///< bounds on g(x) (dimension m)

    std::function<real_t(const vec &)> f;
    std::function<vec(const vec &)> grad_f;
    std::function<vec(const vec &)> g;
    std::function<vec(const vec &, const vec &)> grad_g_prod; ///< (x,v) ↦ ∇g(x)ᵀv

    mutable EvalCounters counters;

    real_t eval_f(const vec &x) const {
        ++counters.f_evals;
        return f(x);
    }
    vec eval_grad_f(const vec &x) const {
        ++counters.grad_f_evals;
        return grad_f(x);
    }
    vec eval_g(const vec &x) const {
        ++counters.g_evals;
        return g(x);
    }
    vec eval_grad_g_prod(const vec &x, const vec &v) const {
        ++counters.grad_g_prod_evals;
        return grad_g_prod(x, v);
    }
};

} // namespace panopt
