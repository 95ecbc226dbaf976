#pragma once

#include <panopt/types.hpp>

#include <stdexcept>

namespace panopt {

/// Rectangular set with per-coordinate extended-real bounds.
/// One-sided and unbounded intervals are encoded with IEEE ±infinity.
struct BoxSet {
    vec lower, upper;

    BoxSet() = default;
    BoxSet(vec lo, vec up) : lower{std::move(lo)}, upper{std::move(up)} {
        if (lower.size() != upper.size())
            throw std::invalid_argument("BoxSet: bound dimension mismatch");
        if ((lower.array() > upper.array()).any())
            throw std::invalid_argument("BoxSet: lower > upper");
    }

    static BoxSet unbounded(index_t n) {
        return {vec::Constant(n, -inf), vec::Constant(n, +inf)};
    }
    static BoxSet uniform(index_t n, real_t lo, real_t up) {
        return {vec::Constant(n, lo), vec::Constant(n, up)};
    }

    index_t size() const { return lower.size(); }

    bool contains(const vec &v, real_t tol = 0) const {
        return (v.array() >= lower.array() - tol).all() &&
               (v.array() <= upper.array() + tol).all();
    }
};

/// Componentwise projection onto the box, Π(v)_i = min(max(v_i, lo_i), up_i).
inline vec project(const BoxSet &box, const vec &v) {
    if (v.size() != box.size())
        throw std::invalid_argument("project: dimension mismatch");
    return v.cwiseMax(box.lower).cwiseMin(box.upper);
}

/// Squared distance to the box in the Σ-norm, Σ_i σ_i (v_i − Π(v)_i)².
inline real_t dist_sq_weighted(const vec &v, const BoxSet &box,
                               const vec &sigma_diag) {
    if (v.size() != box.size() || sigma_diag.size() != v.size())
        throw std::invalid_argument("dist_sq_weighted: dimension mismatch");
    if ((sigma_diag.array() <= 0).any())
        throw std::invalid_argument("dist_sq_weighted: nonpositive weight");
    vec d = v - project(box, v);
    return d.cwiseProduct(d).dot(sigma_diag);
}

} // namespace panopt
