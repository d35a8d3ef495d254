#ifndef FINGERDICT_TOP_TREE_HPP
#define FINGERDICT_TOP_TREE_HPP

// Level-linked (4,8)-tree with one key per leaf.  This is the routing layer
// for the randomized finger dictionary: leaves carry bucket representatives,
// and searches start from an arbitrary leaf rather than the root, walking up
// only far enough to cover the target and then back down.
//
// Accounting convention: comparisons made while searching are probes;
// comparisons and pointer surgery made while inserting, erasing or rekeying
// are work.

#include <cstdint>
#include <vector>

#include "fingerdict/common.hpp"

namespace fingerdict {

struct TopNode;

struct TopLeaf {
    Key key;
    void* payload;
    TopNode* parent;
    TopLeaf* prev;
    TopLeaf* next;
};

struct TopNode {
    bool leaf_level;                 // kids are leaves, not nodes
    std::vector<Key> maxs;           // maxs[i] = largest key under kid i
    std::vector<TopNode*> kids;      // owned; used when !leaf_level
    std::vector<TopLeaf*> leafk;     // owned; used when leaf_level
    Key min_key;
    TopNode* parent;
    TopNode* lnbr;
    TopNode* rnbr;

    std::size_t degree() const { return leaf_level ? leafk.size() : kids.size(); }
};

class TopTree {
  public:
    static constexpr std::size_t kMinDeg = 4;
    static constexpr std::size_t kMaxDeg = 8;

    explicit TopTree(Instrumentation* instr = nullptr) : ext_(instr) {}
    ~TopTree();

    TopTree(const TopTree&) = delete;
    TopTree& operator=(const TopTree&) = delete;

    // Root-descent insert of a fresh key; duplicates are rejected.
    TopLeaf* insert(Key k, void* payload);

    // Removes the leaf and rebalances; the pointer is dead afterwards.
    void erase(TopLeaf* lf);

    // Rekeys a leaf in place.  The new key must keep the leaf order; this is
    // how bucket representatives follow their bucket's minimum.
    void set_key(TopLeaf* lf, Key k);

    // Largest-key leaf with key <= s, starting from an arbitrary leaf.
    // Returns the finger itself on equality and nullptr below the minimum.
    const TopLeaf* finger_search(const TopLeaf* finger, Key s) const;

    TopLeaf* leftmost() const;
    TopLeaf* rightmost() const;
    std::uint64_t size() const { return n_; }
    bool empty() const { return n_ == 0; }

    bool validate() const;
    Instrumentation& instr() const { return ext_ ? *ext_ : own_; }

  private:
    Key node_max(const TopNode* v) const { return v->maxs.back(); }
    TopLeaf* rightmost_under(const TopNode* v) const;
    TopLeaf* leftmost_under(const TopNode* v) const;
    void fix_spine(TopNode* v);
    void split_overflow(TopNode* v);
    void repair_underflow(TopNode* v);
    std::size_t index_in_parent(const TopNode* v) const;
    const TopLeaf* descend(const TopNode* v, Key s) const;
    void destroy(TopNode* v);

    TopNode* root_ = nullptr;
    std::uint64_t n_ = 0;
    Instrumentation* ext_ = nullptr;
    mutable Instrumentation own_;
};

}  // namespace fingerdict

#endif
