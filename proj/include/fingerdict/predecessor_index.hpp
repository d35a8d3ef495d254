#ifndef FINGERDICT_PREDECESSOR_INDEX_HPP
#define FINGERDICT_PREDECESSOR_INDEX_HPP

// Probe-accounted predecessor indexes over small sorted key sets.
//
// The word-RAM predecessor structures the tree design assumes are cited
// black boxes; this library substitutes flat sorted arrays searched by a
// branch-counted binary search, plus block-local scans.  Every comparison
// against a stored key counts one probe, so a query over m keys costs at
// most 2*ceil(log2(m+1)) + 2 probes.
//
// SmallSetIndex is the static owning variant.  TailDynamicIndex additionally
// accepts tail appends with the rebuild work spread incrementally: appends
// land in a small live tail, a full tail is frozen and copied into the base
// a few steps per update, and no single append performs more than
// steps_per_update work units.

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fingerdict/common.hpp"

namespace fingerdict {

// Number of keys <= x.  One probe per comparison.
inline std::size_t pred_rank(std::span<const Key> keys, Key x, Instrumentation& instr) {
    std::size_t lo = 0, hi = keys.size();
    while (lo < hi) {
        std::size_t mid = lo + (hi - lo) / 2;
        instr.probe();
        if (keys[mid] <= x) lo = mid + 1; else hi = mid;
    }
    return lo;
}

// Number of keys < s, i.e. the 0-based position of the first key >= s.
inline std::size_t lower_rank(std::span<const Key> keys, Key s, Instrumentation& instr) {
    std::size_t lo = 0, hi = keys.size();
    while (lo < hi) {
        std::size_t mid = lo + (hi - lo) / 2;
        instr.probe();
        if (keys[mid] < s) lo = mid + 1; else hi = mid;
    }
    return lo;
}

// Position is 1-based, matching the routing-array notation A[1..m].
struct PredecessorHit {
    std::size_t position;
    Key key;
    bool operator==(const PredecessorHit&) const = default;
};

class SmallSetIndex {
  public:
    explicit SmallSetIndex(Instrumentation* instr = nullptr) : ext_(instr) {}

    static SmallSetIndex build_static(std::vector<Key> keys, Instrumentation* instr = nullptr) {
        for (std::size_t i = 1; i < keys.size(); ++i)
            if (keys[i] <= keys[i - 1]) throw NotSorted();
        SmallSetIndex idx(instr);
        idx.keys_ = std::move(keys);
        return idx;
    }

    // Largest stored key <= x, or nothing if every key exceeds x.
    std::optional<PredecessorHit> predecessor(Key x) const {
        std::size_t r = pred_rank(keys_, x, counter());
        if (r == 0) return std::nullopt;
        return PredecessorHit{r, keys_[r - 1]};
    }

    std::size_t size() const { return keys_.size(); }
    Key at(std::size_t i) const { return keys_[i]; }
    std::span<const Key> keys() const { return keys_; }
    std::uint64_t probe_count() const { return counter().probe_count(); }

  private:
    Instrumentation& counter() const { return ext_ ? *ext_ : own_; }

    std::vector<Key> keys_;
    Instrumentation* ext_ = nullptr;
    mutable Instrumentation own_;
};

class TailDynamicIndex {
  public:
    static constexpr std::uint32_t kDefaultStepsPerUpdate = 8;

    explicit TailDynamicIndex(std::uint32_t steps_per_update = kDefaultStepsPerUpdate,
                              Instrumentation* instr = nullptr)
        : steps_(steps_per_update < 4 ? 4 : steps_per_update), ext_(instr) {}

    void append_tail(Key k) {
        Instrumentation& I = counter();
        if (size() > 0 && k <= back()) throw KeyNotGreaterThanMax();
        std::uint32_t budget = steps_;
        if (frozen_done_ == frozen_.size() && live_.size() >= steps_) {
            // Freeze the live tail; it becomes the pending rebuild segment.
            frozen_.swap(live_);
            live_.clear();
            frozen_done_ = 0;
            I.add_work();
            --budget;
        }
        live_.push_back(k);
        I.add_work();
        --budget;
        advance_rebuild(budget, I);
    }

    void remove_tail() {
        if (size() == 0) throw EmptyStructure();
        counter().add_work();
        if (!live_.empty()) { live_.pop_back(); return; }
        if (frozen_done_ < frozen_.size()) {
            frozen_.pop_back();
            if (frozen_done_ == frozen_.size()) { frozen_.clear(); frozen_done_ = 0; }
            return;
        }
        base_.pop_back();
    }

    std::optional<PredecessorHit> predecessor(Key x) const {
        Instrumentation& I = counter();
        std::size_t r = pred_rank(base_, x, I);
        std::size_t best = r;  // count of keys <= x so far, also a 1-based position
        for (std::size_t i = frozen_done_; i < frozen_.size(); ++i) {
            I.probe();
            if (frozen_[i] > x) break;
            ++best;
        }
        if (best == base_.size() + (frozen_.size() - frozen_done_)) {
            for (const Key k : live_) {
                I.probe();
                if (k > x) break;
                ++best;
            }
        }
        if (best == 0) return std::nullopt;
        return PredecessorHit{best, at(best - 1)};
    }

    // Number of keys < s.  Probe-counted like predecessor.
    std::size_t rank_lt(Key s) const {
        Instrumentation& I = counter();
        std::size_t r = lower_rank(base_, s, I);
        if (r == base_.size()) {
            for (std::size_t i = frozen_done_; i < frozen_.size(); ++i) {
                I.probe();
                if (frozen_[i] >= s) return r;
                ++r;
            }
            for (const Key k : live_) {
                I.probe();
                if (k >= s) return r;
                ++r;
            }
        }
        return r;
    }

    std::size_t size() const { return base_.size() + (frozen_.size() - frozen_done_) + live_.size(); }

    Key at(std::size_t i) const {
        if (i < base_.size()) return base_[i];
        i -= base_.size();
        std::size_t pending = frozen_.size() - frozen_done_;
        if (i < pending) return frozen_[frozen_done_ + i];
        return live_[i - pending];
    }

    Key back() const { return at(size() - 1); }
    std::uint32_t steps_per_update() const { return steps_; }
    std::uint64_t probe_count() const { return counter().probe_count(); }
    std::uint64_t work_count() const { return counter().work_count(); }
    bool rebuild_pending() const { return frozen_done_ < frozen_.size(); }

  private:
    void advance_rebuild(std::uint32_t budget, Instrumentation& I) {
        while (budget > 0 && frozen_done_ < frozen_.size()) {
            base_.push_back(frozen_[frozen_done_++]);
            I.add_work();
            --budget;
        }
        if (!frozen_.empty() && frozen_done_ == frozen_.size()) {
            frozen_.clear();
            frozen_done_ = 0;
        }
    }

    Instrumentation& counter() const { return ext_ ? *ext_ : own_; }

    std::vector<Key> base_;          // committed, sorted
    std::vector<Key> frozen_;        // pending rebuild segment; [0, frozen_done_) already copied
    std::size_t frozen_done_ = 0;
    std::vector<Key> live_;          // recent appends, all above every committed key
    std::uint32_t steps_;
    Instrumentation* ext_ = nullptr;
    mutable Instrumentation own_;
};

}  // namespace fingerdict

#endif
