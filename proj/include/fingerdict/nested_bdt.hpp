#ifndef FINGERDICT_NESTED_BDT_HPP
#define FINGERDICT_NESTED_BDT_HPP

// Nested block-degree-tree forest over a strictly increasing tail sequence.
//
// Geometry.  For every scale m the rank axis is cut into aligned blocks of
// B_m = 2^(2^m) positions.  Each block carries a two-level tree: a root whose
// children ("leaf parents") hold flat probe-counted arrays over aligned
// B_{m-1} sub-blocks (two leaves at scale 0, where the root is its own leaf
// parent).  The deeper levels of the conceptual degree-recurrence tree are
// not materialized; they are exactly the trees of the smaller scales, and an
// element owns one copy per scale, addressed through copy_parent[m].
// Positions inside a node follow from rank arithmetic, so a copy costs one
// routing entry plus one pointer.  The top scale M satisfies B_M >= size, so
// it always holds a single tree.
//
// Finger search walks a (leaf, scale) pair.  A covered leaf parent routes by
// nested_level_select to a strictly smaller scale, following the element's
// own copy in O(1); an uncovered one ascends: same-level neighbor shortcut
// (strict, with a gap guard that resolves targets falling between adjacent
// spans), then the enclosing root, then the same block one scale up, hopping
// the cross-tree root chain at block boundaries.  Direction is re-evaluated
// every round, so a turnaround descends with the same machinery.
//
// Growth.  Appends maintain every active scale plus, four copy-appends per
// update, a hidden prebuild of scale M+1; crossing a capacity threshold
// activates the hidden scale as a constant-time flip.  Shrinking below a
// threshold demotes the top scale back to hidden without tearing it down, so
// oscillation around a threshold never spikes.
//
// Probe accounting: every key comparison and routing-array access counts one
// probe, except the zero-distance equality test against the finger itself;
// structural mutation counts work units (see common.hpp).

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "fingerdict/common.hpp"
#include "fingerdict/predecessor_index.hpp"
#include "fingerdict/schedule.hpp"

namespace fingerdict {

struct LevelNode;

struct Leaf {
    Key key;
    std::uint64_t rank;  // 1-based
    std::array<LevelNode*, 8> copy_parent{};  // leaf parent per scale, null above built scales

    Leaf(Key k, std::uint64_t r) : key(k), rank(r) {}
};

struct LevelNode {
    int scale;
    std::uint64_t start_rank;  // first rank of the span, 1-based
    Key min_key;               // key at start_rank; immutable while the node lives
    LevelNode* parent = nullptr;
    LevelNode* lnbr = nullptr;  // same-level chain, crossing tree boundaries
    LevelNode* rnbr = nullptr;
    std::unique_ptr<TailDynamicIndex> leaf_keys;       // leaf parents only
    std::vector<Key> maxs;                             // roots only, one max per child
    std::vector<std::unique_ptr<LevelNode>> kids;      // roots only

    LevelNode(int m, std::uint64_t start, Key first) : scale(m), start_rank(start), min_key(first) {}
    bool is_leaf_parent() const { return leaf_keys != nullptr; }
};

// Routing selection: the smallest scale j >= 0 whose aligned 2^(2^j) block
// around position i (1-based) in A already bounds the target from above,
// i.e. s <= A[min(|A|, (i div 2^(2^j)) * 2^(2^j) + 2^(2^j))].  Throws
// TargetBeyondArray when s exceeds A[|A|].  One probe per tried scale.
int nested_level_select(std::span<const Key> a, std::size_t i, Key s,
                        Instrumentation* instr = nullptr);

struct SpaceReport {
    std::uint64_t leaves = 0;
    std::uint64_t nodes = 0;
    std::uint64_t routing_entries = 0;
    std::uint64_t copy_links = 0;
    std::uint64_t total() const { return leaves + nodes + routing_entries + copy_links; }
};

class NestedForest {
  public:
    explicit NestedForest(Instrumentation* instr = nullptr) : ext_(instr) {}

    // Interior arrays capture the counter address, so the forest is pinned.
    NestedForest(const NestedForest&) = delete;
    NestedForest& operator=(const NestedForest&) = delete;

    // Appends a key strictly above the current maximum; returns its leaf.
    const Leaf* append_leaf(Key k);
    void remove_tail_leaf();

    // Predecessor search from a finger: the leaf with the largest key <= s,
    // or null when every key exceeds s.
    const Leaf* pred_leaf(const Leaf* finger, Key s) const;

    // Exact finger search; throws KeyAbsent when s is not stored.
    const Leaf* fsearch(const Leaf* finger, Key s) const;

    std::uint64_t size() const { return leaves_.size(); }
    int height() const { return active_M_ + 1; }          // 0 while size <= 1
    int nesting_depth() const { return active_M_ < 0 ? 0 : active_M_; }
    const Leaf* leaf_at(std::uint64_t rank) const { return leaves_.at(rank - 1).get(); }
    const Leaf* min_leaf() const { return leaves_.empty() ? nullptr : leaves_.front().get(); }
    const Leaf* max_leaf() const { return leaves_.empty() ? nullptr : leaves_.back().get(); }

    // Full structural audit; throws std::logic_error on any broken invariant.
    bool validate() const;

    SpaceReport space() const;
    Instrumentation& instr() const { return ext_ ? *ext_ : own_; }

    static constexpr int kPrebuildStepsPerUpdate = 4;

  private:
    struct Scale {
        int m = 0;
        std::uint64_t built = 0;  // copies cover ranks 1..built
        std::vector<std::unique_ptr<LevelNode>> roots;
        LevelNode* tail_leaf_parent = nullptr;
    };

    void append_copy(Scale& sc, Leaf* lf);
    void remove_copy(Scale& sc);
    void prebuild_slice();

    const Leaf* resolve_in(const LevelNode* lp, Key s) const;
    const Leaf* leftmost_under(const LevelNode* node) const;
    const Leaf* rightmost_under(const LevelNode* node) const;
    const LevelNode* root_at(const Leaf* lf, int t) const;
    Key node_max(const LevelNode* node) const;
    int select_right(const LevelNode* lp, std::size_t i, Key s) const;
    int select_left(const LevelNode* lp, std::size_t i, Key s) const;

    struct Descent {
        const Leaf* done = nullptr;      // resolved predecessor (may be null: no predecessor)
        const LevelNode* child = nullptr;  // covering leaf parent to continue in
        bool resolved = false;
    };
    Descent descend_step(const LevelNode* root, Key s) const;

    std::vector<std::unique_ptr<Leaf>> leaves_;
    std::vector<Scale> scales_;  // index == scale; indexes above active_M_ are hidden
    int active_M_ = -1;
    Instrumentation* ext_ = nullptr;
    mutable Instrumentation own_;
};

}  // namespace fingerdict

#endif
