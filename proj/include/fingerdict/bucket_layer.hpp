#ifndef FINGERDICT_BUCKET_LAYER_HPP
#define FINGERDICT_BUCKET_LAYER_HPP

// Tail finger dictionary: the nested forest holds one representative per
// bucket of Theta(log log n) consecutive keys, so the forest stays a factor
// of bucket_capacity smaller than the key set while searches pay only an
// extra in-bucket scan.
//
// Handles are global ranks (1-based).  Mutations touch only the tail, so a
// live element's rank never changes and every full bucket holds exactly
// `capacity` keys, which makes handle -> bucket addressing pure arithmetic.
//
// Two spreading mechanisms keep single updates cheap:
//   - opening a bucket enqueues its representative's forest append as a job
//     with a declared cost estimate, paid off ceil(est/capacity) per insert
//     and executed whole once funded (within one bucket's worth of inserts,
//     so at most the youngest bucket is ever unrepresented), and
//   - when the size leaves the window [n0/2, 2*n0] and the capacity schedule
//     disagrees with the current capacity, a shadow dictionary with the new
//     capacity is rebuilt three elements per update behind the scenes; the
//     old structure stays fully authoritative until the shadow catches up
//     and an O(1) swap retires it.  Otherwise the window just slides.

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "fingerdict/common.hpp"
#include "fingerdict/nested_bdt.hpp"
#include "fingerdict/schedule.hpp"

namespace fingerdict {

class TailFingerDict {
  public:
    explicit TailFingerDict(Instrumentation* instr = nullptr);

    // Sub-structures capture the counter address, so the dict is pinned.
    TailFingerDict(const TailFingerDict&) = delete;
    TailFingerDict& operator=(const TailFingerDict&) = delete;

    // Appends a key strictly above the maximum; returns its rank handle.
    std::uint64_t insert_tail(Key k);

    // Removes the largest key.
    void delete_tail();

    // Finger search: rank of the largest key <= s, or 0 when none exists.
    // The finger must be a live handle; ranks past the tail are stale.
    std::uint64_t search_star(std::uint64_t finger, Key s) const;

    std::uint64_t size() const { return n_; }
    Key at(std::uint64_t rank) const;
    std::uint32_t capacity() const { return cap_; }
    bool rebuild_running() const { return shadow_ != nullptr; }
    const NestedForest& forest() const { return *forest_; }

    // Counted cells: bucket cells plus forest leaves, nodes, routing entries
    // and copy links (the shadow, when present, is transient and excluded).
    std::uint64_t counted_cells() const;

    bool validate() const;
    Instrumentation& instr() const { return ext_ ? *ext_ : own_; }

    static constexpr int kRebuildCopiesPerUpdate = 3;

  private:
    struct TailBucket {
        std::vector<Key> elems;
    };
    struct RepJob {
        std::uint64_t bucket_index;
        std::uint64_t est;
        std::uint64_t paid;
    };

    TailFingerDict(std::uint32_t cap, Instrumentation* master);

    std::uint64_t bucket_of(std::uint64_t rank) const { return (rank - 1) / cap_; }
    std::uint64_t scan_bucket(std::uint64_t bucket_index, Key s) const;
    void pay_pending_job();
    void rebuild_step();
    void maybe_trigger_rebuild();

    std::vector<TailBucket> buckets_;
    std::unique_ptr<NestedForest> forest_;
    std::optional<RepJob> pending_job_;
    std::uint64_t n_ = 0;
    std::uint64_t n0_ = 0;  // size at the last rebuild decision
    std::uint32_t cap_;
    bool allow_rebuild_ = true;

    std::unique_ptr<TailFingerDict> shadow_;
    std::uint64_t rebuild_cursor_ = 0;  // shadow covers ranks 1..cursor

    Instrumentation* ext_ = nullptr;
    mutable Instrumentation own_;
};

}  // namespace fingerdict

#endif
