#pragma once

#include <panopt/problems/analytic.hpp>
#include <panopt/problems/chain.hpp>

#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace panopt::problems {

/// A named benchmark instance; known_solution is set for the analytic
/// problems only.
struct SuiteProblem {
    std::string name;
    ProblemSpec problem;
    vec x0;
    std::optional<vec> x_star;
    std::optional<vec> y_star;
};

namespace detail {

/// Random inequality-constrained QP  min ½xᵀQx + cᵀx  s.t.  Ax ≤ b, x ∈ C,
/// with conditioning growing with `hardness`.
inline SuiteProblem random_qp(unsigned seed, int hardness,
                              const std::string &name) {
    const index_t n = 10, m = 4;
    std::mt19937 rng{seed};
    std::normal_distribution<real_t> nd;
    mat M(n, n), A(m, n);
    vec c(n), b(m), scale(n);
    for (index_t i = 0; i < n; ++i)
        for (index_t j = 0; j < n; ++j)
            M(i, j) = nd(rng);
    for (index_t i = 0; i < n; ++i)
        scale[i] = std::pow(real_t(10), hardness * real_t(i) / real_t(n - 1));
    mat Q = M.transpose() * scale.asDiagonal() * M + mat::Identity(n, n);
    for (index_t i = 0; i < m; ++i)
        for (index_t j = 0; j < n; ++j)
            A(i, j) = nd(rng);
    for (index_t i = 0; i < n; ++i)
        c[i] = nd(rng);
    for (index_t i = 0; i < m; ++i)
        b[i] = 0.2 * std::abs(nd(rng));

    SuiteProblem p;
    p.name          = name;
    p.problem.n     = n;
    p.problem.m     = m;
    p.problem.box_c = BoxSet::uniform(n, -10, 10);
    p.problem.box_d = {vec::Constant(m, -inf), b};
    p.problem.f = [Q, c](const vec &x) {
        return real_t(0.5) * x.dot(Q * x) + c.dot(x);
    };
    p.problem.grad_f = [Q, c](const vec &x) { return (Q * x + c).eval(); };
    p.problem.g = [A](const vec &x) { return (A * x).eval(); };
    p.problem.grad_g_prod = [A](const vec &, const vec &v) {
        return (A.transpose() * v).eval();
    };
    p.x0 = vec::Zero(n);
    return p;
}

/// Random nonconvex problem: convex quadratic plus sinusoidal ripple, with a
/// random linear constraint band.
inline SuiteProblem random_nonconvex(unsigned seed, real_t ripple,
                                     const std::string &name) {
    const index_t n = 8, m = 3;
    std::mt19937 rng{seed};
    std::normal_distribution<real_t> nd;
    std::uniform_real_distribution<real_t> ud(1, 3);
    mat A(m, n);
    vec c(n), omega(n), phase(n), lo(m), up(m);
    for (index_t i = 0; i < m; ++i)
        for (index_t j = 0; j < n; ++j)
            A(i, j) = nd(rng);
    for (index_t i = 0; i < n; ++i) {
        c[i]     = nd(rng);
        omega[i] = ud(rng);
        phase[i] = nd(rng);
    }
    for (index_t i = 0; i < m; ++i) {
        real_t mid = nd(rng);
        lo[i]      = mid - 0.5;
        up[i]      = mid + 0.5;
    }

    SuiteProblem p;
    p.name          = name;
    p.problem.n     = n;
    p.problem.m     = m;
    p.problem.box_c = BoxSet::uniform(n, -5, 5);
    p.problem.box_d = {lo, up};
    p.problem.f = [c, omega, phase, ripple](const vec &x) {
        real_t s = real_t(0.5) * x.squaredNorm() + c.dot(x);
        for (index_t i = 0; i < x.size(); ++i)
            s += ripple * std::sin(omega[i] * x[i] + phase[i]);
        return s;
    };
    p.problem.grad_f = [c, omega, phase, ripple](const vec &x) {
        vec g = x + c;
        for (index_t i = 0; i < x.size(); ++i)
            g[i] += ripple * omega[i] * std::cos(omega[i] * x[i] + phase[i]);
        return g;
    };
    p.problem.g = [A](const vec &x) { return (A * x).eval(); };
    p.problem.grad_g_prod = [A](const vec &, const vec &v) {
        return (A.transpose() * v).eval();
    };
    p.x0 = vec::Zero(n);
    return p;
}

/// Himmelblau's function over a box with a linear constraint.
inline SuiteProblem himmelblau() {
    SuiteProblem p;
    p.name          = "himmelblau-box";
    p.problem.n     = 2;
    p.problem.m     = 1;
    p.problem.box_c = BoxSet::uniform(2, -5, 5);
    p.problem.box_d = {vec::Constant(1, -inf), vec::Constant(1, 5)};
    p.problem.f = [](const vec &x) {
        real_t a = x[0] * x[0] + x[1] - 11, b = x[0] + x[1] * x[1] - 7;
        return a * a + b * b;
    };
    p.problem.grad_f = [](const vec &x) {
        real_t a = x[0] * x[0] + x[1] - 11, b = x[0] + x[1] * x[1] - 7;
        vec g(2);
        g[0] = 4 * x[0] * a + 2 * b;
        g[1] = 2 * a + 4 * x[1] * b;
        return g;
    };
    p.problem.g = [](const vec &x) {
        return vec::Constant(1, x[0] + x[1]).eval();
    };
    p.problem.grad_g_prod = [](const vec &, const vec &v) {
        return vec::Constant(2, v[0]).eval();
    };
    p.x0 = vec::Zero(2);
    return p;
}

/// N-dimensional Rosenbrock over a box with a sum constraint.
inline SuiteProblem rosenbrock_nd(index_t n, const std::string &name) {
    SuiteProblem p;
    p.name          = name;
    p.problem.n     = n;
    p.problem.m     = 1;
    p.problem.box_c = BoxSet::uniform(n, -2, 2);
    p.problem.box_d = {vec::Constant(1, -inf), vec::Constant(1, real_t(n))};
    p.problem.f = [](const vec &x) {
        real_t s = 0;
        for (index_t i = 0; i + 1 < x.size(); ++i) {
            real_t a = 1 - x[i], b = x[i + 1] - x[i] * x[i];
            s += a * a + 100 * b * b;
        }
        return s;
    };
    p.problem.grad_f = [](const vec &x) {
        vec g = vec::Zero(x.size());
        for (index_t i = 0; i + 1 < x.size(); ++i) {
            real_t b = x[i + 1] - x[i] * x[i];
            g[i] += -2 * (1 - x[i]) - 400 * x[i] * b;
            g[i + 1] += 200 * b;
        }
        return g;
    };
    p.problem.g = [](const vec &x) {
        return vec::Constant(1, x.sum()).eval();
    };
    p.problem.grad_g_prod = [](const vec &x, const vec &v) {
        return vec::Constant(x.size(), v[0]).eval();
    };
    p.x0 = vec::Zero(n);
    return p;
}

inline SuiteProblem from_analytic(AnalyticProblem a) {
    SuiteProblem p;
    p.name    = std::move(a.name);
    p.problem = std::move(a.problem);
    p.x0      = std::move(a.x0);
    p.x_star  = std::move(a.x_star);
    p.y_star  = std::move(a.y_star);
    return p;
}

} // namespace detail

/// A small hanging-chain instance usable as an in-suite problem.
inline SuiteProblem chain_suite_problem(int n_balls, int horizon,
                                        const std::string &name) {
    ChainParams cp;
    cp.n_balls = n_balls;
    cp.horizon = horizon;
    SuiteProblem p;
    p.name    = name;
    p.problem = chain_ocp(cp, chain_initial_state(cp));
    p.x0      = vec::Zero(p.problem.n);
    return p;
}

/// The internal benchmark suite (≥ 20 problems, deterministic given `seed`).
inline std::vector<SuiteProblem> build_suite(unsigned seed = 1) {
    std::vector<SuiteProblem> out;
    for (auto &a : analytic_suite())
        out.push_back(detail::from_analytic(std::move(a)));
    for (int i = 0; i < 8; ++i)
        out.push_back(detail::random_qp(seed + 100 * static_cast<unsigned>(i),
                                        i % 4, "qp-rand-" + std::to_string(i)));
    for (int i = 0; i < 8; ++i)
        out.push_back(detail::random_nonconvex(
            seed + 1000 + 100 * static_cast<unsigned>(i),
            real_t(0.5) + real_t(1.5) * (i % 4),
            "nonconvex-rand-" + std::to_string(i)));
    out.push_back(detail::himmelblau());
    out.push_back(detail::rosenbrock_nd(5, "rosenbrock-5d"));
    out.push_back(chain_suite_problem(3, 8, "chain-small"));
    return out;
}

} // namespace panopt::problems
