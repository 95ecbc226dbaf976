#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <limits>

namespace panopt {

using real_t  = double;
using index_t = Eigen::Index;
using vec     = Eigen::VectorXd;
using mat     = Eigen::MatrixXd;

inline constexpr real_t inf      = std::numeric_limits<real_t>::infinity();
inline constexpr real_t eps_mach = std::numeric_limits<real_t>::epsilon();

enum class SolveStatus {
    Converged,
    MaxIter,
    MaxOuterIter,
    NotFinite,
    Interrupted,
};

inline const char *to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "Converged";
        case SolveStatus::MaxIter: return "MaxIter";
        case SolveStatus::MaxOuterIter: return "MaxOuterIter";
        case SolveStatus::NotFinite: return "NotFinite";
        case SolveStatus::Interrupted: return "Interrupted";
    }
    return "?";
}

/// Counts of problem and inner-objective evaluations during a solve.
struct EvalCounters {
    std::uint64_t f_evals           = 0;
    std::uint64_t grad_f_evals      = 0;
    std::uint64_t g_evals           = 0;
    std::uint64_t grad_g_prod_evals = 0;
    std::uint64_t psi_evals         = 0;
    std::uint64_t grad_psi_evals    = 0;

    void reset() { *this = EvalCounters{}; }

    EvalCounters operator-(const EvalCounters &o) const {
        return {f_evals - o.f_evals,
                grad_f_evals - o.grad_f_evals,
                g_evals - o.g_evals,
                grad_g_prod_evals - o.grad_g_prod_evals,
                psi_evals - o.psi_evals,
                grad_psi_evals - o.grad_psi_evals};
    }

    std::uint64_t total() const {
        return f_evals + grad_f_evals + g_evals + grad_g_prod_evals;
    }
};

} // namespace panopt
