#pragma once

#include <panopt/alm.hpp>
#include <panopt/structured.hpp>

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace panopt {

/// The six solver configurations: (direction provider, Hessian-vector term,
/// line-search mode).
enum class SolverVariant {
    Panoc,                ///< L-BFGS on R_γ, original line search
    PanocIls,             ///< L-BFGS on R_γ, improved line search
    StructPanoc,          ///< structured with FD Hessian-vector term
    StructPanocIls,
    ApproxStructPanoc,    ///< structured, Hessian-vector term dropped
    ApproxStructPanocIls,
};

inline constexpr std::array<SolverVariant, 6> all_variants{
    SolverVariant::Panoc,
    SolverVariant::PanocIls,
    SolverVariant::StructPanoc,
    SolverVariant::StructPanocIls,
    SolverVariant::ApproxStructPanoc,
    SolverVariant::ApproxStructPanocIls,
};

inline const char *to_string(SolverVariant v) {
    switch (v) {
        case SolverVariant::Panoc: return "panoc";
        case SolverVariant::PanocIls: return "panoc-ils";
        case SolverVariant::StructPanoc: return "struct-panoc";
        case SolverVariant::StructPanocIls: return "struct-panoc-ils";
        case SolverVariant::ApproxStructPanoc: return "approx-struct-panoc";
        case SolverVariant::ApproxStructPanocIls: return "approx-struct-panoc-ils";
    }
    return "?";
}

inline std::optional<SolverVariant> parse_variant(std::string_view s) {
    for (SolverVariant v : all_variants)
        if (s == to_string(v))
            return v;
    return std::nullopt;
}

struct VariantConfig {
    bool structured;
    bool include_hessian_vec;
    LineSearch line_search;
};

inline VariantConfig variant_config(SolverVariant v) {
    switch (v) {
        case SolverVariant::Panoc: return {false, false, LineSearch::Original};
        case SolverVariant::PanocIls: return {false, false, LineSearch::Improved};
        case SolverVariant::StructPanoc: return {true, true, LineSearch::Original};
        case SolverVariant::StructPanocIls: return {true, true, LineSearch::Improved};
        case SolverVariant::ApproxStructPanoc: return {true, false, LineSearch::Original};
        case SolverVariant::ApproxStructPanocIls: return {true, false, LineSearch::Improved};
    }
    return {false, false, LineSearch::Original};
}

inline DirectionFactory make_direction_factory(SolverVariant v, index_t n,
                                               int memory) {
    VariantConfig cfg = variant_config(v);
    if (!cfg.structured)
        return [n, memory]() -> std::unique_ptr<DirectionProvider> {
            return std::make_unique<LbfgsDirection>(n, memory);
        };
    StructuredDirParams sp;
    sp.include_hessian_vec = cfg.include_hessian_vec;
    return [n, memory, sp]() -> std::unique_ptr<DirectionProvider> {
        return std::make_unique<StructuredDirection>(n, memory, sp);
    };
}

/// Run the full ALM solve with the named variant's direction provider and
/// line-search mode.
inline AlmResult solve_with_variant(const ProblemSpec &problem, const vec &x0,
                                    const vec &y0, const AlmParams &ap,
                                    PanocParams pp, SolverVariant v,
                                    const PanocCallback &inner_callback = {}) {
    pp.line_search = variant_config(v).line_search;
    return alm_solve(problem, x0, y0, ap, pp,
                     make_direction_factory(v, problem.n, pp.lbfgs_memory),
                     inner_callback);
}

} // namespace panopt
