#pragma once

#include <panopt/types.hpp>

#include <stdexcept>
#include <vector>

namespace panopt {

/// Limited-memory BFGS inverse-Hessian estimate applied via the two-loop
/// recursion. Update pairs are always stored at full dimension; in Masked
/// mode the curvature condition cannot be checked at push time (the relevant
/// index set is only known at application), so the check is deferred to
/// apply_masked and failing pairs are skipped for that application only.
class LbfgsBuffer {
  public:
    enum class Mode { Standard, Masked };

    LbfgsBuffer(index_t n, int memory, Mode mode = Mode::Standard,
                real_t curvature_eps = 1e-12)
        : n_{n}, memory_{memory}, mode_{mode}, curvature_eps_{curvature_eps} {
        if (memory <= 0)
            throw std::invalid_argument("LbfgsBuffer: memory must be positive");
        pairs_.reserve(static_cast<size_t>(memory));
    }

    index_t dim() const { return n_; }
    int memory() const { return memory_; }
    int count() const { return count_; }
    Mode mode() const { return mode_; }

    void reset() {
        count_ = 0;
        head_  = 0;
    }

    /// Store an update pair, evicting the oldest at capacity. In Standard
    /// mode the pair is rejected unless sᵀy > ε_c‖s‖².
    bool push(const vec &s, const vec &y) {
        if (s.size() != n_ || y.size() != n_)
            throw std::invalid_argument("LbfgsBuffer::push: dimension mismatch");
        if (!s.allFinite() || !y.allFinite())
            return false;
        if (mode_ == Mode::Standard && !(s.dot(y) > curvature_eps_ * s.squaredNorm()))
            return false;
        int slot = (head_ + count_) % memory_;
        if (count_ == memory_) {
            slot  = head_;
            head_ = (head_ + 1) % memory_;
        } else {
            ++count_;
        }
        if (static_cast<int>(pairs_.size()) <= slot)
            pairs_.resize(static_cast<size_t>(slot) + 1);
        pairs_[static_cast<size_t>(slot)] = {s, y};
        return true;
    }

    /// H·v over all coordinates; identity on an empty buffer.
    vec apply(const vec &v) const {
        if (v.size() != n_)
            throw std::invalid_argument("LbfgsBuffer::apply: dimension mismatch");
        return apply_masked(v, all_indices());
    }

    /// Two-loop recursion restricted to the index set `mask`: only the masked
    /// components of each stored pair participate, and pairs whose masked
    /// curvature fails sᵀy > ε_c‖s‖² are skipped without mutating the buffer.
    vec apply_masked(const vec &v_sub, const std::vector<index_t> &mask) const {
        const auto k = static_cast<index_t>(mask.size());
        if (v_sub.size() != k)
            throw std::invalid_argument("LbfgsBuffer::apply_masked: size mismatch");
        if (count_ == 0 || k == 0)
            return v_sub;

        // Gather masked pairs oldest → newest, dropping failed curvature.
        std::vector<vec> ss, yy;
        std::vector<real_t> rho;
        ss.reserve(static_cast<size_t>(count_));
        yy.reserve(static_cast<size_t>(count_));
        for (int i = 0; i < count_; ++i) {
            const Pair &pr = pairs_[static_cast<size_t>((head_ + i) % memory_)];
            vec sj(k), yj(k);
            for (index_t j = 0; j < k; ++j) {
                sj[j] = pr.s[mask[static_cast<size_t>(j)]];
                yj[j] = pr.y[mask[static_cast<size_t>(j)]];
            }
            real_t d = sj.dot(yj);
            if (!(d > curvature_eps_ * sj.squaredNorm()))
                continue;
            ss.push_back(std::move(sj));
            yy.push_back(std::move(yj));
            rho.push_back(1 / d);
        }
        if (ss.empty())
            return v_sub;

        const auto np = static_cast<int>(ss.size());
        std::vector<real_t> alpha(static_cast<size_t>(np));
        vec q = v_sub;
        for (int i = np - 1; i >= 0; --i) {
            auto ui = static_cast<size_t>(i);
            alpha[ui] = rho[ui] * ss[ui].dot(q);
            q -= alpha[ui] * yy[ui];
        }
        // Initial scaling from the most recent usable pair.
        const auto last = static_cast<size_t>(np - 1);
        q *= ss[last].dot(yy[last]) / yy[last].squaredNorm();
        for (int i = 0; i < np; ++i) {
            auto ui     = static_cast<size_t>(i);
            real_t beta = rho[ui] * yy[ui].dot(q);
            q += (alpha[ui] - beta) * ss[ui];
        }
        return q;
    }

  private:
    struct Pair {
        vec s, y;
    };

    std::vector<index_t> all_indices() const {
        std::vector<index_t> idx(static_cast<size_t>(n_));
        for (index_t i = 0; i < n_; ++i)
            idx[static_cast<size_t>(i)] = i;
        return idx;
    }

    index_t n_;
    int memory_;
    Mode mode_;
    real_t curvature_eps_;
    std::vector<Pair> pairs_;
    int head_  = 0;
    int count_ = 0;
};

} // namespace panopt
