#pragma once

#include <panopt/problem.hpp>

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

namespace panopt::problems {

/// Hanging chain of point masses connected by springs: n_balls free balls
/// between a fixed origin and a velocity-controlled actuator, with a cubic
/// floor constraint on all positions.
struct ChainParams {
    int n_balls          = 6;
    real_t spring_const  = 1.6;    ///< N/m
    real_t rest_length   = 0.0055; ///< m
    real_t ball_mass     = 0.03;   ///< kg
    real_t dt            = 0.05;   ///< s
    real_t v_max         = 1;      ///< actuator speed bound per component
    real_t floor_a       = 0.6;    ///< constraint x_z ≥ c(x_x−a)³ + d(x_x−a) + b
    real_t floor_b       = -1.4;
    real_t floor_c       = 5;
    real_t floor_d       = 2.2;
    int horizon          = 40;
    real_t weight_pos    = 25;   ///< α, on ‖x_actuator − x_end‖²
    real_t weight_vel    = 1;    ///< β, on ball speeds
    real_t weight_input  = 0.01; ///< γ_w, on ‖u‖²
    Eigen::Vector3d x_end{1, 0, 0};
    bool gravity_enabled = true;
    Eigen::Vector3d gravity{0, 0, -9.81};

    /// State layout: ball positions (3 n_balls), ball velocities (3 n_balls),
    /// actuator position (3).
    index_t state_dim() const { return 6 * n_balls + 3; }
};

/// Balls equidistant between 0 and 1 on the x-axis, actuator at (1,0,0),
/// everything at rest.
inline vec chain_initial_state(const ChainParams &cp) {
    vec x = vec::Zero(cp.state_dim());
    for (int i = 0; i < cp.n_balls; ++i)
        x[3 * i] = real_t(i + 1) / (cp.n_balls + 1);
    x[6 * cp.n_balls] = 1;
    return x;
}

namespace detail {

inline Eigen::Vector3d ball_pos(const ChainParams &cp, const vec &x, int i) {
    // i = 0 is the fixed origin, i = n_balls + 1 the actuator
    if (i == 0)
        return Eigen::Vector3d::Zero();
    if (i == cp.n_balls + 1)
        return x.segment<3>(6 * cp.n_balls);
    return x.segment<3>(3 * (i - 1));
}

} // namespace detail

/// Time derivative of the chain state for actuator velocity u.
/// Spring force on segment i: F_i = D(1 − L/‖d_i‖)d_i with d_i = p_i − p_{i−1}.
inline vec chain_ode(const ChainParams &cp, const vec &x, const vec &u) {
    const int n = cp.n_balls;
    std::vector<Eigen::Vector3d> F(static_cast<size_t>(n) + 2);
    for (int i = 1; i <= n + 1; ++i) {
        Eigen::Vector3d d =
            detail::ball_pos(cp, x, i) - detail::ball_pos(cp, x, i - 1);
        real_t r = d.norm();
        if (r == 0)
            throw std::domain_error("chain_ode: coincident chain points");
        F[static_cast<size_t>(i)] =
            cp.spring_const * (1 - cp.rest_length / r) * d;
    }
    vec dx(cp.state_dim());
    dx.head(3 * n) = x.segment(3 * n, 3 * n); // ṗ_i = v_i
    for (int i = 1; i <= n; ++i) {
        Eigen::Vector3d acc =
            (F[static_cast<size_t>(i) + 1] - F[static_cast<size_t>(i)]) /
            cp.ball_mass;
        if (cp.gravity_enabled)
            acc += cp.gravity;
        dx.segment<3>(3 * n + 3 * (i - 1)) = acc;
    }
    dx.segment<3>(6 * n) = u;
    return dx;
}

/// Vector-Jacobian products of chain_ode: given the adjoint w of the output,
/// returns (∂ode/∂x)ᵀw and (∂ode/∂u)ᵀw. The spring-force Jacobian w.r.t. its
/// segment vector is D[(1 − L/r)I + (L/r³)ddᵀ], which is symmetric.
inline std::pair<vec, vec> chain_ode_vjp(const ChainParams &cp, const vec &x,
                                         const vec & /*u*/, const vec &w) {
    const int n = cp.n_balls;
    vec wx = vec::Zero(cp.state_dim());
    // ṗ_i = v_i
    wx.segment(3 * n, 3 * n) = w.head(3 * n);
    // accelerations → spring forces
    std::vector<Eigen::Vector3d> Fbar(static_cast<size_t>(n) + 2,
                                      Eigen::Vector3d::Zero());
    for (int i = 1; i <= n; ++i) {
        Eigen::Vector3d wv = w.segment<3>(3 * n + 3 * (i - 1)) / cp.ball_mass;
        Fbar[static_cast<size_t>(i) + 1] += wv;
        Fbar[static_cast<size_t>(i)] -= wv;
    }
    // spring forces → segment vectors → positions
    std::vector<Eigen::Vector3d> dbar(static_cast<size_t>(n) + 2);
    for (int i = 1; i <= n + 1; ++i) {
        Eigen::Vector3d d =
            detail::ball_pos(cp, x, i) - detail::ball_pos(cp, x, i - 1);
        real_t r                  = d.norm();
        const Eigen::Vector3d &fb = Fbar[static_cast<size_t>(i)];
        dbar[static_cast<size_t>(i)] =
            cp.spring_const * ((1 - cp.rest_length / r) * fb +
                               cp.rest_length / (r * r * r) * d.dot(fb) * d);
    }
    for (int i = 1; i <= n; ++i)
        wx.segment<3>(3 * (i - 1)) =
            dbar[static_cast<size_t>(i)] - dbar[static_cast<size_t>(i) + 1];
    wx.segment<3>(6 * n) += dbar[static_cast<size_t>(n) + 1];
    vec wu = w.segment<3>(6 * n);
    return {std::move(wx), std::move(wu)};
}

/// One classical RK4 step of length dt.
inline vec chain_step_rk4(const ChainParams &cp, const vec &x, const vec &u) {
    const real_t h = cp.dt;
    vec k1 = chain_ode(cp, x, u);
    vec k2 = chain_ode(cp, x + (h / 2) * k1, u);
    vec k3 = chain_ode(cp, x + (h / 2) * k2, u);
    vec k4 = chain_ode(cp, x + h * k3, u);
    return x + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
}

/// Adjoint of one RK4 step: given w = adjoint of the step output, returns
/// (∂step/∂x)ᵀw and (∂step/∂u)ᵀw. Stages are recomputed forward, then the
/// four ODE VJPs are chained in reverse.
inline std::pair<vec, vec> chain_step_rk4_vjp(const ChainParams &cp,
                                              const vec &x, const vec &u,
                                              const vec &w) {
    const real_t h = cp.dt;
    vec k1 = chain_ode(cp, x, u);
    vec x2 = x + (h / 2) * k1;
    vec k2 = chain_ode(cp, x2, u);
    vec x3 = x + (h / 2) * k2;
    vec k3 = chain_ode(cp, x3, u);
    vec x4 = x + h * k3;

    vec k4bar          = (h / 6) * w;
    auto [gx4, gu4]    = chain_ode_vjp(cp, x4, u, k4bar);
    vec k3bar          = (h / 3) * w + h * gx4;
    auto [gx3, gu3]    = chain_ode_vjp(cp, x3, u, k3bar);
    vec k2bar          = (h / 3) * w + (h / 2) * gx3;
    auto [gx2, gu2]    = chain_ode_vjp(cp, x2, u, k2bar);
    vec k1bar          = (h / 6) * w + (h / 2) * gx2;
    auto [gx1, gu1]    = chain_ode_vjp(cp, x, u, k1bar);

    vec wx = w + gx1 + gx2 + gx3 + gx4;
    vec wu = gu1 + gu2 + gu3 + gu4;
    return {std::move(wx), std::move(wu)};
}

namespace detail {

inline real_t floor_gap(const ChainParams &cp, const Eigen::Vector3d &p) {
    real_t t = p.x() - cp.floor_a;
    return p.z() - cp.floor_c * t * t * t - cp.floor_d * t - cp.floor_b;
}

inline Eigen::Vector3d floor_gap_grad(const ChainParams &cp,
                                      const Eigen::Vector3d &p) {
    real_t t = p.x() - cp.floor_a;
    return {-3 * cp.floor_c * t * t - cp.floor_d, 0, 1};
}

inline real_t stage_cost(const ChainParams &cp, const vec &x, const vec &u) {
    const int n = cp.n_balls;
    Eigen::Vector3d pa = x.segment<3>(6 * n);
    return cp.weight_pos * (pa - cp.x_end).squaredNorm() +
           cp.weight_vel * x.segment(3 * n, 3 * n).squaredNorm() +
           cp.weight_input * u.squaredNorm();
}

inline vec stage_cost_grad_x(const ChainParams &cp, const vec &x) {
    const int n = cp.n_balls;
    vec g       = vec::Zero(cp.state_dim());
    g.segment(3 * n, 3 * n) = 2 * cp.weight_vel * x.segment(3 * n, 3 * n);
    g.segment<3>(6 * n) = 2 * cp.weight_pos * (x.segment<3>(6 * n) - cp.x_end);
    return g;
}

inline std::vector<vec> rollout(const ChainParams &cp, const vec &x_init,
                                const vec &u_stacked) {
    std::vector<vec> xs(static_cast<size_t>(cp.horizon) + 1);
    xs[0] = x_init;
    for (int k = 0; k < cp.horizon; ++k)
        xs[static_cast<size_t>(k) + 1] = chain_step_rk4(
            cp, xs[static_cast<size_t>(k)], u_stacked.segment<3>(3 * k));
    return xs;
}

} // namespace detail

/// Single-shooting optimal control problem over the actuator velocities
/// u_0..u_{N−1}: the decision vector is ℝ^{3N} with box [−v_max, v_max], the
/// cost sums the stage cost at (x_k, u_{k−1}) for k = 1..N, and one floor
/// constraint per ball and the actuator at every step gives m = N(n_balls+1)
/// one-sided constraints. Gradients use a reverse sweep through the RK4
/// rollout built on the hand-derived ODE VJPs.
inline ProblemSpec chain_ocp(const ChainParams &cp, const vec &x_init) {
    const int N  = cp.horizon;
    const int nb = cp.n_balls;
    ProblemSpec prob;
    prob.n     = 3 * N;
    prob.m     = static_cast<index_t>(N) * (nb + 1);
    prob.box_c = BoxSet::uniform(prob.n, -cp.v_max, cp.v_max);
    prob.box_d = {vec::Zero(prob.m), vec::Constant(prob.m, inf)};

    prob.f = [cp, x_init](const vec &u) {
        vec x      = x_init;
        real_t sum = 0;
        for (int k = 0; k < cp.horizon; ++k) {
            vec uk = u.segment<3>(3 * k);
            x      = chain_step_rk4(cp, x, uk);
            sum += detail::stage_cost(cp, x, uk);
        }
        return sum;
    };

    prob.grad_f = [cp, x_init](const vec &u) {
        auto xs  = detail::rollout(cp, x_init, u);
        vec grad = vec::Zero(u.size());
        vec lam  = vec::Zero(cp.state_dim());
        for (int k = cp.horizon; k >= 1; --k) {
            vec uk = u.segment<3>(3 * (k - 1));
            lam += detail::stage_cost_grad_x(cp, xs[static_cast<size_t>(k)]);
            auto [wx, wu] = chain_step_rk4_vjp(
                cp, xs[static_cast<size_t>(k) - 1], uk, lam);
            grad.segment<3>(3 * (k - 1)) = wu + 2 * cp.weight_input * uk;
            lam                          = std::move(wx);
        }
        return grad;
    };

    prob.g = [cp, x_init](const vec &u) {
        auto xs = detail::rollout(cp, x_init, u);
        vec out(static_cast<index_t>(cp.horizon) * (cp.n_balls + 1));
        index_t r = 0;
        for (int k = 1; k <= cp.horizon; ++k) {
            const vec &x = xs[static_cast<size_t>(k)];
            for (int i = 1; i <= cp.n_balls + 1; ++i)
                out[r++] = detail::floor_gap(cp, detail::ball_pos(cp, x, i));
        }
        return out;
    };

    prob.grad_g_prod = [cp, x_init](const vec &u, const vec &v) {
        auto xs  = detail::rollout(cp, x_init, u);
        vec grad = vec::Zero(u.size());
        vec lam  = vec::Zero(cp.state_dim());
        const int per_step = cp.n_balls + 1;
        for (int k = cp.horizon; k >= 1; --k) {
            const vec &x = xs[static_cast<size_t>(k)];
            for (int i = 1; i <= per_step; ++i) {
                real_t vi = v[static_cast<index_t>(k - 1) * per_step + (i - 1)];
                if (vi == 0)
                    continue;
                Eigen::Vector3d gg =
                    vi * detail::floor_gap_grad(cp, detail::ball_pos(cp, x, i));
                if (i == cp.n_balls + 1)
                    lam.segment<3>(6 * cp.n_balls) += gg;
                else
                    lam.segment<3>(3 * (i - 1)) += gg;
            }
            auto [wx, wu] = chain_step_rk4_vjp(
                cp, xs[static_cast<size_t>(k) - 1],
                u.segment<3>(3 * (k - 1)), lam);
            grad.segment<3>(3 * (k - 1)) = wu;
            lam                          = std::move(wx);
        }
        return grad;
    };

    return prob;
}

} // namespace panopt::problems
