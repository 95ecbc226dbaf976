#pragma once

#include <panopt/prox.hpp>
#include <panopt/types.hpp>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace panopt::test {

inline std::mt19937 make_rng(unsigned seed) { return std::mt19937{seed}; }

inline vec random_vec(std::mt19937 &rng, index_t n, real_t lo = -1,
                      real_t hi = 1) {
    std::uniform_real_distribution<real_t> d(lo, hi);
    vec v(n);
    for (index_t i = 0; i < n; ++i)
        v[i] = d(rng);
    return v;
}

/// Central finite differences of a scalar function, step 1e−6·(1+|x_i|).
inline vec central_diff_grad(const std::function<real_t(const vec &)> &f,
                             const vec &x) {
    vec g(x.size());
    for (index_t i = 0; i < x.size(); ++i) {
        real_t h = 1e-6 * (1 + std::abs(x[i]));
        vec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        g[i] = (f(xp) - f(xm)) / (2 * h);
    }
    return g;
}

/// Dense BFGS inverse-Hessian recursion matching the two-loop result:
/// H₀ = scale·I from the newest pair, pairs applied oldest → newest with
/// H ← (I − ρsyᵀ)H(I − ρysᵀ) + ρssᵀ. Pairs failing the curvature test are
/// dropped, mirroring the masked application rule.
inline mat dense_bfgs_inverse(const std::vector<vec> &ss,
                              const std::vector<vec> &yy,
                              real_t curvature_eps = 1e-12) {
    std::vector<size_t> valid;
    for (size_t i = 0; i < ss.size(); ++i)
        if (ss[i].dot(yy[i]) > curvature_eps * ss[i].squaredNorm())
            valid.push_back(i);
    const index_t n = ss.empty() ? 0 : ss.front().size();
    if (valid.empty())
        return mat::Identity(n, n);
    size_t last  = valid.back();
    real_t scale = ss[last].dot(yy[last]) / yy[last].squaredNorm();
    mat H        = scale * mat::Identity(n, n);
    mat I        = mat::Identity(n, n);
    for (size_t i : valid) {
        real_t rho = 1 / ss[i].dot(yy[i]);
        mat V      = I - rho * yy[i] * ss[i].transpose();
        H = V.transpose() * H * V + rho * ss[i] * ss[i].transpose();
    }
    return H;
}

/// Quadratic inner oracle ψ(x) = ½xᵀQx + cᵀx over a box.
inline SmoothOracle quadratic_oracle(mat Q, vec c, BoxSet box,
                                     EvalCounters *counters = nullptr) {
    SmoothOracle o;
    o.box      = std::move(box);
    o.counters = counters;
    o.psi_fn   = [Q, c](const vec &x) {
        return real_t(0.5) * x.dot(Q * x) + c.dot(x);
    };
    o.grad_fn = [Q, c](const vec &x) { return (Q * x + c).eval(); };
    return o;
}

/// 2-D Rosenbrock inner oracle over a box.
inline SmoothOracle rosenbrock_oracle(BoxSet box,
                                      EvalCounters *counters = nullptr) {
    SmoothOracle o;
    o.box      = std::move(box);
    o.counters = counters;
    o.psi_fn   = [](const vec &x) {
        real_t a = 1 - x[0], b = x[1] - x[0] * x[0];
        return a * a + 100 * b * b;
    };
    o.grad_fn = [](const vec &x) {
        vec g(2);
        real_t b = x[1] - x[0] * x[0];
        g[0]     = -2 * (1 - x[0]) - 400 * x[0] * b;
        g[1]     = 200 * b;
        return g;
    };
    return o;
}

} // namespace panopt::test
