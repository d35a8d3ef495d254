#ifndef FINGERDICT_RANDOMIZED_DICT_HPP
#define FINGERDICT_RANDOMIZED_DICT_HPP

// General-update finger dictionary: keys live in buckets of Theta((log log n)^2)
// consecutive elements, bucket minima are the leaves of a level-linked
// (4,8)-tree, and a seeded maintenance routine keeps bucket sizes near the
// target with randomized spot checks instead of eager rebalancing.
//
// Updates are bucket-local.  Every c = alpha * ceil(log2 log2 n_max) updates
// a maintenance round runs:
//   step 1 draws one update uniformly from the window just ended and checks
//          the bucket that received it (equivalently: bucket i is checked
//          with probability delta_i / c), rebalancing it if critical;
//   step 2 checks the most critical bucket via a lazily maintained heap
//          (stale entries discarded, ties broken towards the leftmost
//          bucket) and rebalances it if critical.
// Rebalances execute atomically; their cost is already amortized across the
// window that scheduled them.  An overfull bucket splits in half; an
// underfull one equalizes with an adjacent bucket at target fullness or
// fuses into a neighbour otherwise.  Equalization falls back to fusing when
// halving cannot lift both buckets clear of the thresholds, so every
// rebalance leaves its buckets noncritical (asserted), except when a single
// bucket remains.  Two hard guards bound what sampling may miss: a bucket
// reaching twice the target (or half of it) is rebalanced immediately, and
// a target change sweeps the structure once.  Guard hits are counted.
//
// All fullness arithmetic uses n_max, the largest size the dictionary has
// reached, so bucket targets never shrink mid-run.
//
// Handles are stable slot ids.  A slot records its key and current bucket
// and is updated in place when rebalancing moves the element, so fingers
// survive maintenance; deleting an element retires its slot and later use
// throws StaleFinger.

#include <cstdint>
#include <deque>
#include <queue>
#include <unordered_set>
#include <utility>
#include <vector>

#include "fingerdict/common.hpp"
#include "fingerdict/top_tree.hpp"

namespace fingerdict {

enum class MaintAction : std::uint8_t { kNone = 0, kSplit = 1, kTransfer = 2, kFuse = 3 };

struct MaintEvent {
    std::uint64_t update_index;  // updates seen when the event fired
    std::uint8_t source;         // 0 step-1 draw, 1 step-2 heap, 2 hard guard, 3 sweep
    MaintAction action;
    bool operator==(const MaintEvent&) const = default;
};

class RandomizedFingerDict {
  public:
    explicit RandomizedFingerDict(std::uint64_t seed, Instrumentation* instr = nullptr);
    ~RandomizedFingerDict();

    RandomizedFingerDict(const RandomizedFingerDict&) = delete;
    RandomizedFingerDict& operator=(const RandomizedFingerDict&) = delete;

    // Bootstrap/front insert: allowed on an empty dictionary or below the
    // current minimum; anywhere else the finger-relative insert must be used.
    std::uint64_t insert_first(Key k);

    // Inserts k immediately after the finger element.  k must lie strictly
    // between the finger key and its successor (or above the finger when it
    // is the maximum).
    std::uint64_t insert_at(std::uint64_t finger, Key k);

    void delete_at(std::uint64_t handle);

    // Locates a key known to be present, starting from the finger.
    std::uint64_t finger_search(std::uint64_t finger, Key k) const;

    // Relaxation of finger_search: handle of the largest key <= s, or 0.
    std::uint64_t pred_search(std::uint64_t finger, Key s) const;

    Key key_of(std::uint64_t handle) const;
    bool alive(std::uint64_t handle) const;
    std::uint64_t size() const { return n_; }

    // Bucket state, exposed for discipline checks: current size target,
    // per-bucket sizes left to right, and the criticality a bucket of the
    // given size would have right now.
    std::uint64_t bucket_target() const;
    std::uint64_t cadence() const;
    std::vector<std::uint64_t> bucket_sizes() const;
    double criticality_of_size(std::uint64_t bucket_size) const;
    std::uint64_t guard_activations() const { return guard_hits_; }
    const std::vector<MaintEvent>& action_log() const { return events_; }

    bool validate() const;
    Instrumentation& instr() const { return ext_ ? *ext_ : own_; }

    // Rebalance arithmetic, pure and exposed so tests can pin it down.  An
    // overfull bucket splits into ceil/floor halves.  Equalization hands the
    // deficient bucket the ceil share of the pooled keys; it is used only
    // when the donor sits at target fullness and both shares clear the
    // underfull threshold, otherwise the bucket fuses into a neighbour.
    static std::pair<std::uint64_t, std::uint64_t> split_shares(std::uint64_t size);
    static std::pair<std::uint64_t, std::uint64_t> equalize_shares(std::uint64_t deficient,
                                                                   std::uint64_t donor);
    static bool equalize_feasible(std::uint64_t deficient, std::uint64_t donor,
                                  std::uint64_t target);

    static constexpr double kUnderfullFrac = 0.7;
    static constexpr double kOverfullFrac = 1.8;
    static constexpr int kAlpha = 2;
    static constexpr int kMaxStaleHeapPops = 16;

  private:
    struct RBucket {
        std::vector<Key> keys;             // sorted
        std::vector<std::uint64_t> slots;  // parallel to keys
        TopLeaf* rep = nullptr;
    };
    struct Slot {
        Key key;
        RBucket* bucket;
        bool alive;
    };
    struct HeapEntry {
        double rho;
        Key min_at;  // bucket minimum when pushed; leftmost bucket wins ties
        std::uint64_t size_at;
        std::uint64_t target_at;
        RBucket* bucket;
    };
    struct HeapOrder {
        bool operator()(const HeapEntry& a, const HeapEntry& b) const {
            if (a.rho != b.rho) return a.rho < b.rho;
            return a.min_at > b.min_at;
        }
    };

    Slot& live_slot(std::uint64_t handle);
    const Slot& live_slot(std::uint64_t handle) const;
    RBucket* bucket_of_leaf(const TopLeaf* lf) const;
    double criticality(const RBucket* b) const;
    void note_size_change(RBucket* b);
    void after_update(RBucket* touched);
    MaintAction rebalance(RBucket* b);
    RBucket* split(RBucket* b);
    void transfer(RBucket* deficient, RBucket* donor, bool donor_is_left);
    RBucket* fuse(RBucket* gone, RBucket* into, bool into_is_left);
    void maintenance_round();
    void sweep_after_target_change();
    std::uint64_t pred_slot_in(const RBucket* b, Key s) const;
    RBucket* left_of(const RBucket* b) const;
    RBucket* right_of(const RBucket* b) const;
    void log_event(std::uint8_t source, MaintAction action);

    // Counter members precede the tree so its captured address is valid.
    Instrumentation* ext_ = nullptr;
    mutable Instrumentation own_;

    TopTree tree_;
    std::deque<Slot> registry_;  // handle = index + 1
    std::unordered_set<RBucket*> live_buckets_;
    std::vector<RBucket*> window_;  // bucket touched by each update this window
    std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapOrder> heap_;
    std::vector<MaintEvent> events_;
    mutable SplitMix64 rng_;
    std::uint64_t n_ = 0;
    std::uint64_t n_max_ = 1;
    std::uint64_t updates_seen_ = 0;
    std::uint64_t window_len_ = 0;  // frozen at window start
    std::uint64_t last_target_ = 0;
    std::uint64_t guard_hits_ = 0;
};

}  // namespace fingerdict

#endif
