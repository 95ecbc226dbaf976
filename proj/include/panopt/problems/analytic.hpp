#pragma once

#include <panopt/problem.hpp>

#include <Eigen/Dense>

#include <random>
#include <string>
#include <vector>

namespace panopt::problems {

/// A benchmark problem with its KKT solution known in closed form or computed
/// exactly at generation time.
struct AnalyticProblem {
    std::string name;
    ProblemSpec problem;
    vec x0;
    vec x_star;
    vec y_star;
};

/// min (x−2)²  s.t.  x ≤ 1.   KKT: x* = 1, y* = 2.
inline AnalyticProblem penalty_1d() {
    AnalyticProblem p;
    p.name          = "penalty-1d";
    p.problem.n     = 1;
    p.problem.m     = 1;
    p.problem.box_c = BoxSet::unbounded(1);
    p.problem.box_d = {vec::Constant(1, -inf), vec::Constant(1, 1)};
    p.problem.f = [](const vec &x) { return (x[0] - 2) * (x[0] - 2); };
    p.problem.grad_f = [](const vec &x) {
        return vec::Constant(1, 2 * (x[0] - 2)).eval();
    };
    p.problem.g = [](const vec &x) { return x; };
    p.problem.grad_g_prod = [](const vec &, const vec &v) { return v; };
    p.x0     = vec::Zero(1);
    p.x_star = vec::Constant(1, 1);
    p.y_star = vec::Constant(1, 2);
    return p;
}

/// 2-D Rosenbrock over [−2,2]² with the ball constraint x₁² + x₂² ≤ 2.
/// The unconstrained minimizer (1,1) lies on the constraint boundary with a
/// vanishing multiplier.
inline AnalyticProblem rosenbrock_box() {
    AnalyticProblem p;
    p.name          = "rosenbrock-box";
    p.problem.n     = 2;
    p.problem.m     = 1;
    p.problem.box_c = BoxSet::uniform(2, -2, 2);
    p.problem.box_d = {vec::Constant(1, -inf), vec::Constant(1, 2)};
    p.problem.f = [](const vec &x) {
        real_t a = 1 - x[0], b = x[1] - x[0] * x[0];
        return a * a + 100 * b * b;
    };
    p.problem.grad_f = [](const vec &x) {
        vec g(2);
        real_t b = x[1] - x[0] * x[0];
        g[0]     = -2 * (1 - x[0]) - 400 * x[0] * b;
        g[1]     = 200 * b;
        return g;
    };
    p.problem.g = [](const vec &x) {
        return vec::Constant(1, x.squaredNorm()).eval();
    };
    p.problem.grad_g_prod = [](const vec &x, const vec &v) {
        return (2 * v[0] * x).eval();
    };
    p.x0 = vec(2);
    p.x0 << -1.5, 2.0;
    p.x_star = vec::Constant(2, 1);
    p.y_star = vec::Zero(1);
    return p;
}

/// min (x−2)²  s.t.  x = 0.5 (two-sided constraint with z̲ = z̄).
/// KKT: x* = 0.5, y* = 3.
inline AnalyticProblem equality_1d() {
    AnalyticProblem p;
    p.name          = "equality-1d";
    p.problem.n     = 1;
    p.problem.m     = 1;
    p.problem.box_c = BoxSet::unbounded(1);
    p.problem.box_d = {vec::Constant(1, 0.5), vec::Constant(1, 0.5)};
    p.problem.f = [](const vec &x) { return (x[0] - 2) * (x[0] - 2); };
    p.problem.grad_f = [](const vec &x) {
        return vec::Constant(1, 2 * (x[0] - 2)).eval();
    };
    p.problem.g = [](const vec &x) { return x; };
    p.problem.grad_g_prod = [](const vec &, const vec &v) { return v; };
    p.x0     = vec::Zero(1);
    p.x_star = vec::Constant(1, 0.5);
    p.y_star = vec::Constant(1, 3);
    return p;
}

/// Convex QP  min ½xᵀQx + cᵀx  s.t.  Ax = b  with random SPD Q; the KKT
/// solution is computed by a dense saddle-point solve at generation time.
inline AnalyticProblem qp_equality(index_t n = 10, index_t m_eq = 3,
                                   unsigned seed = 42,
                                   const std::string &name = "qp10") {
    std::mt19937 rng{seed};
    std::normal_distribution<real_t> nd;
    mat M(n, n), A(m_eq, n);
    vec c(n), b(m_eq);
    for (index_t i = 0; i < n; ++i)
        for (index_t j = 0; j < n; ++j)
            M(i, j) = nd(rng);
    mat Q = M.transpose() * M + mat::Identity(n, n);
    for (index_t i = 0; i < m_eq; ++i)
        for (index_t j = 0; j < n; ++j)
            A(i, j) = nd(rng);
    for (index_t i = 0; i < n; ++i)
        c[i] = nd(rng);
    for (index_t i = 0; i < m_eq; ++i)
        b[i] = 0.5 * nd(rng);

    // KKT system [Q Aᵀ; A 0][x; y] = [−c; b].
    mat K = mat::Zero(n + m_eq, n + m_eq);
    K.topLeftCorner(n, n)      = Q;
    K.topRightCorner(n, m_eq)  = A.transpose();
    K.bottomLeftCorner(m_eq, n) = A;
    vec rhs(n + m_eq);
    rhs << -c, b;
    vec sol = K.fullPivLu().solve(rhs);

    AnalyticProblem p;
    p.name          = name;
    p.problem.n     = n;
    p.problem.m     = m_eq;
    p.problem.box_c = BoxSet::unbounded(n);
    p.problem.box_d = {b, b};
    p.problem.f = [Q, c](const vec &x) {
        return real_t(0.5) * x.dot(Q * x) + c.dot(x);
    };
    p.problem.grad_f = [Q, c](const vec &x) { return (Q * x + c).eval(); };
    p.problem.g = [A](const vec &x) { return (A * x).eval(); };
    p.problem.grad_g_prod = [A](const vec &, const vec &v) {
        return (A.transpose() * v).eval();
    };
    p.x0     = vec::Zero(n);
    p.x_star = sol.head(n);
    p.y_star = sol.tail(m_eq);
    return p;
}

/// The KKT-verifiable problems used as convergence oracles.
inline std::vector<AnalyticProblem> analytic_suite() {
    return {penalty_1d(), rosenbrock_box(), equality_1d(), qp_equality()};
}

} // namespace panopt::problems
