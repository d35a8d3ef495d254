#include "fingerdict/top_tree.hpp"

#include <algorithm>

#include "fingerdict/predecessor_index.hpp"

namespace fingerdict {

TopTree::~TopTree() {
    if (root_) destroy(root_);
}

void TopTree::destroy(TopNode* v) {
    if (v->leaf_level) {
        for (TopLeaf* lf : v->leafk) delete lf;
    } else {
        for (TopNode* kid : v->kids) destroy(kid);
    }
    delete v;
}

TopLeaf* TopTree::rightmost_under(const TopNode* v) const {
    while (!v->leaf_level) v = v->kids.back();
    return v->leafk.back();
}

TopLeaf* TopTree::leftmost_under(const TopNode* v) const {
    while (!v->leaf_level) v = v->kids.front();
    return v->leafk.front();
}

TopLeaf* TopTree::leftmost() const { return root_ ? leftmost_under(root_) : nullptr; }
TopLeaf* TopTree::rightmost() const { return root_ ? rightmost_under(root_) : nullptr; }

std::size_t TopTree::index_in_parent(const TopNode* v) const {
    const TopNode* p = v->parent;
    for (std::size_t i = 0; i < p->kids.size(); ++i)
        if (p->kids[i] == v) return i;
    fd_require(false, "node missing from its parent");
    return 0;
}

// Recomputes max and min summaries from v up to the root.
void TopTree::fix_spine(TopNode* v) {
    while (v) {
        if (v->leaf_level) {
            for (std::size_t i = 0; i < v->leafk.size(); ++i) v->maxs[i] = v->leafk[i]->key;
            v->min_key = v->leafk.front()->key;
        } else {
            for (std::size_t i = 0; i < v->kids.size(); ++i) v->maxs[i] = node_max(v->kids[i]);
            v->min_key = v->kids.front()->min_key;
        }
        instr().add_work();
        v = v->parent;
    }
}

TopLeaf* TopTree::insert(Key k, void* payload) {
    Instrumentation& I = instr();
    if (!root_) {
        root_ = new TopNode{true, {}, {}, {}, k, nullptr, nullptr, nullptr};
        I.add_work();
    }
    TopNode* v = root_;
    while (!v->leaf_level) {
        std::size_t i = 0;
        while (i + 1 < v->maxs.size() && v->maxs[i] < k) { I.add_work(); ++i; }
        I.add_work();
        v = v->kids[i];
    }
    std::size_t pos = 0;
    while (pos < v->leafk.size() && v->leafk[pos]->key < k) { I.add_work(); ++pos; }
    if (pos < v->leafk.size() && v->leafk[pos]->key == k)
        throw DuplicateKey("insert: key already present");
    TopLeaf* lf = new TopLeaf{k, payload, v, nullptr, nullptr};
    if (!v->leafk.empty()) {
        if (pos < v->leafk.size()) {
            lf->next = v->leafk[pos];
            lf->prev = lf->next->prev;
        } else {
            lf->prev = v->leafk.back();
            lf->next = lf->prev->next;
        }
    }
    if (lf->prev) lf->prev->next = lf;
    if (lf->next) lf->next->prev = lf;
    v->leafk.insert(v->leafk.begin() + pos, lf);
    v->maxs.insert(v->maxs.begin() + pos, k);
    I.add_work(v->leafk.size() - pos);
    ++n_;
    fix_spine(v);
    split_overflow(v);
    return lf;
}

void TopTree::split_overflow(TopNode* v) {
    Instrumentation& I = instr();
    while (v->degree() > kMaxDeg) {
        const std::size_t keep = (v->degree() + 1) / 2;
        TopNode* right = new TopNode{v->leaf_level, {}, {}, {}, {}, v->parent, v, v->rnbr};
        if (v->rnbr) v->rnbr->lnbr = right;
        v->rnbr = right;
        right->maxs.assign(v->maxs.begin() + keep, v->maxs.end());
        v->maxs.resize(keep);
        if (v->leaf_level) {
            right->leafk.assign(v->leafk.begin() + keep, v->leafk.end());
            v->leafk.resize(keep);
            for (TopLeaf* lf : right->leafk) lf->parent = right;
            right->min_key = right->leafk.front()->key;
        } else {
            right->kids.assign(v->kids.begin() + keep, v->kids.end());
            v->kids.resize(keep);
            for (TopNode* kid : right->kids) kid->parent = right;
            right->min_key = right->kids.front()->min_key;
        }
        I.add_work(right->degree());
        if (!v->parent) {
            TopNode* top = new TopNode{false, {node_max(v), node_max(right)}, {v, right},
                                       {},   v->min_key,                      nullptr,
                                       nullptr, nullptr};
            v->parent = right->parent = top;
            root_ = top;
            I.add_work();
            return;
        }
        TopNode* p = v->parent;
        const std::size_t i = index_in_parent(v);
        p->kids.insert(p->kids.begin() + i + 1, right);
        p->maxs.insert(p->maxs.begin() + i + 1, node_max(right));
        p->maxs[i] = node_max(v);
        I.add_work(p->kids.size() - i);
        v = p;
    }
}

void TopTree::erase(TopLeaf* lf) {
    Instrumentation& I = instr();
    TopNode* v = lf->parent;
    std::size_t pos = 0;
    while (v->leafk[pos] != lf) { I.add_work(); ++pos; }
    v->leafk.erase(v->leafk.begin() + pos);
    v->maxs.erase(v->maxs.begin() + pos);
    I.add_work(v->leafk.size() - pos + 1);
    if (lf->prev) lf->prev->next = lf->next;
    if (lf->next) lf->next->prev = lf->prev;
    delete lf;
    --n_;
    if (v->leafk.empty()) {
        // Only the root may drain completely; the tree is now empty.
        fd_require(v == root_, "non-root leaf holder drained");
        delete v;
        root_ = nullptr;
        return;
    }
    fix_spine(v);
    repair_underflow(v);
}

void TopTree::repair_underflow(TopNode* v) {
    Instrumentation& I = instr();
    while (v != root_ && v->degree() < kMinDeg) {
        TopNode* p = v->parent;
        const std::size_t i = index_in_parent(v);
        TopNode* left = i > 0 ? p->kids[i - 1] : nullptr;
        TopNode* right = i + 1 < p->kids.size() ? p->kids[i + 1] : nullptr;
        if (left && left->degree() > kMinDeg) {
            // Borrow the left sibling's last kid.
            if (v->leaf_level) {
                TopLeaf* moved = left->leafk.back();
                left->leafk.pop_back();
                moved->parent = v;
                v->leafk.insert(v->leafk.begin(), moved);
                v->maxs.insert(v->maxs.begin(), moved->key);
            } else {
                TopNode* moved = left->kids.back();
                left->kids.pop_back();
                moved->parent = v;
                v->kids.insert(v->kids.begin(), moved);
                v->maxs.insert(v->maxs.begin(), node_max(moved));
            }
            left->maxs.pop_back();
            I.add_work(v->degree());
            fix_spine(left);
            fix_spine(v);
            return;
        }
        if (right && right->degree() > kMinDeg) {
            // Borrow the right sibling's first kid.
            if (v->leaf_level) {
                TopLeaf* moved = right->leafk.front();
                right->leafk.erase(right->leafk.begin());
                moved->parent = v;
                v->leafk.push_back(moved);
                v->maxs.push_back(moved->key);
            } else {
                TopNode* moved = right->kids.front();
                right->kids.erase(right->kids.begin());
                moved->parent = v;
                v->kids.push_back(moved);
                v->maxs.push_back(node_max(moved));
            }
            right->maxs.erase(right->maxs.begin());
            I.add_work(right->degree() + 1);
            fix_spine(right);
            fix_spine(v);
            return;
        }
        // Merge with a sibling (prefer left): the pair fits in one node.
        TopNode* into = left ? left : v;
        TopNode* from = left ? v : right;
        fd_require(from != nullptr, "underfull node with no sibling");
        if (into->leaf_level) {
            for (TopLeaf* moved : from->leafk) {
                moved->parent = into;
                into->leafk.push_back(moved);
                into->maxs.push_back(moved->key);
            }
        } else {
            for (TopNode* moved : from->kids) {
                moved->parent = into;
                into->kids.push_back(moved);
                into->maxs.push_back(node_max(moved));
            }
        }
        I.add_work(from->degree());
        from->leafk.clear();
        from->kids.clear();
        const std::size_t gone = index_in_parent(from);
        p->kids.erase(p->kids.begin() + gone);
        p->maxs.erase(p->maxs.begin() + gone);
        if (from->lnbr) from->lnbr->rnbr = from->rnbr;
        if (from->rnbr) from->rnbr->lnbr = from->lnbr;
        delete from;
        fix_spine(into);
        v = p;
    }
    if (v == root_ && !v->leaf_level && v->kids.size() == 1) {
        TopNode* kid = v->kids.front();
        kid->parent = nullptr;
        v->kids.clear();
        delete v;
        root_ = kid;
        I.add_work();
    }
}

void TopTree::set_key(TopLeaf* lf, Key k) {
    fd_require(!lf->prev || lf->prev->key < k, "set_key: breaks order with the left neighbour");
    fd_require(!lf->next || k < lf->next->key, "set_key: breaks order with the right neighbour");
    lf->key = k;
    instr().add_work();
    fix_spine(lf->parent);
}

const TopLeaf* TopTree::descend(const TopNode* v, Key s) const {
    Instrumentation& I = instr();
    while (true) {
        std::span<const Key> maxs(v->maxs.data(), v->maxs.size());
        std::size_t idx = lower_rank(maxs, s, I);  // first kid whose max is >= s
        if (idx == v->maxs.size()) idx = v->maxs.size() - 1;  // covered, so defensive only
        if (v->leaf_level) {
            const TopLeaf* lf = v->leafk[idx];
            I.probe();
            if (lf->key <= s) return lf;
            // Keys below s live strictly left of this leaf.
            return lf->prev;
        }
        const TopNode* kid = v->kids[idx];
        I.probe();
        if (s < kid->min_key) {
            fd_require(idx > 0, "descend entered below the subtree minimum");
            return rightmost_under(v->kids[idx - 1]);
        }
        v = kid;
    }
}

const TopLeaf* TopTree::finger_search(const TopLeaf* finger, Key s) const {
    fd_require(finger != nullptr, "finger_search: null finger");
    if (finger->key == s) return finger;  // entry equality is free
    Instrumentation& I = instr();
    const TopNode* v = finger->parent;
    if (s > finger->key) {
        for (int guard = 0; guard < 10000; ++guard) {
            I.probe();
            if (s <= node_max(v)) return descend(v, s);
            const TopNode* nb = v->rnbr;
            if (!nb) return rightmost_under(v);  // s beyond the global maximum
            I.probe();
            if (s < nb->min_key) return rightmost_under(v);  // s falls in the seam
            I.probe();
            if (s <= node_max(nb)) { v = nb; continue; }
            v = v->parent;
            fd_require(v != nullptr, "climbed past an uncovered root");
        }
    } else {
        for (int guard = 0; guard < 10000; ++guard) {
            I.probe();
            if (s >= v->min_key) return descend(v, s);
            const TopNode* nb = v->lnbr;
            if (!nb) return nullptr;  // s below the global minimum
            I.probe();
            if (s > node_max(nb)) return rightmost_under(nb);  // s falls in the seam
            I.probe();
            if (s >= nb->min_key) { v = nb; continue; }
            v = v->parent;
            fd_require(v != nullptr, "climbed past an uncovered root");
        }
    }
    fd_require(false, "finger_search failed to terminate");
    return nullptr;
}

namespace {

struct LevelScan {
    std::vector<const TopNode*> first_at_depth;
    std::vector<const TopNode*> last_seen;
};

void check_node(const TopNode* v, const TopNode* root, std::size_t depth, LevelScan& scan,
                std::uint64_t& leaves, const TopLeaf*& prev_leaf) {
    const std::size_t deg = v->degree();
    if (v == root) {
        fd_require(deg >= (v->leaf_level ? 1u : 2u), "root degree too small");
    } else {
        fd_require(deg >= TopTree::kMinDeg, "node underfull");
    }
    fd_require(deg <= TopTree::kMaxDeg, "node overfull");
    fd_require(v->maxs.size() == deg, "summary length mismatch");
    if (scan.first_at_depth.size() == depth) {
        scan.first_at_depth.push_back(v);
        scan.last_seen.push_back(nullptr);
        fd_require(v->lnbr == nullptr, "leftmost node has a left neighbour");
    }
    fd_require(v->lnbr == scan.last_seen[depth], "level link out of order");
    if (scan.last_seen[depth]) fd_require(scan.last_seen[depth]->rnbr == v, "level link asymmetric");
    scan.last_seen[depth] = v;
    if (v->leaf_level) {
        fd_require(v->kids.empty(), "leaf holder with interior kids");
        for (std::size_t i = 0; i < deg; ++i) {
            const TopLeaf* lf = v->leafk[i];
            fd_require(lf->parent == v, "leaf parent pointer wrong");
            fd_require(v->maxs[i] == lf->key, "leaf summary wrong");
            fd_require(lf->prev == prev_leaf, "leaf chain broken");
            if (prev_leaf) {
                fd_require(prev_leaf->next == lf, "leaf chain asymmetric");
                fd_require(prev_leaf->key < lf->key, "keys not increasing");
            }
            prev_leaf = lf;
            ++leaves;
        }
        fd_require(v->min_key == v->leafk.front()->key, "min summary wrong");
    } else {
        fd_require(v->leafk.empty(), "interior node with leaf kids");
        for (std::size_t i = 0; i < deg; ++i) {
            const TopNode* kid = v->kids[i];
            fd_require(kid->parent == v, "kid parent pointer wrong");
            fd_require(v->maxs[i] == kid->maxs.back(), "interior summary wrong");
            check_node(kid, root, depth + 1, scan, leaves, prev_leaf);
        }
        fd_require(v->min_key == v->kids.front()->min_key, "min summary wrong");
        for (const TopNode* kid : v->kids)
            fd_require(kid->leaf_level == v->kids.front()->leaf_level, "uneven leaf depth");
    }
}

}  // namespace

bool TopTree::validate() const {
    if (!root_) {
        fd_require(n_ == 0, "size nonzero on empty tree");
        return true;
    }
    fd_require(root_->parent == nullptr, "root has a parent");
    fd_require(root_->lnbr == nullptr && root_->rnbr == nullptr, "root has neighbours");
    LevelScan scan;
    std::uint64_t leaves = 0;
    const TopLeaf* prev = nullptr;
    check_node(root_, root_, 0, scan, leaves, prev);
    fd_require(leaves == n_, "leaf count mismatch");
    for (const TopNode* tail : scan.last_seen)
        fd_require(tail->rnbr == nullptr, "rightmost node has a right neighbour");
    fd_require(prev == nullptr || prev->next == nullptr, "leaf chain overruns");
    return true;
}

}  // namespace fingerdict
