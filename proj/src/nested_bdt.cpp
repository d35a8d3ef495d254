#include "fingerdict/nested_bdt.hpp"

#include <utility>

namespace fingerdict {

namespace {

struct SpanArr {
    std::span<const Key> s;
    std::size_t size() const { return s.size(); }
    Key at(std::size_t i) const { return s[i]; }
};

// Rightward selection: smallest scale j whose aligned 2^(2^j) block at or
// after position i already bounds s from above.  One probe per tried scale.
template <class Arr>
int nls_right(const Arr& a, std::size_t i, Key s, Instrumentation& instr) {
    const std::uint64_t n = a.size();
    fd_require(n > 0 && i >= 1 && i <= n, "selection position out of range");
    for (int j = 0;; ++j) {
        const std::uint64_t bj = scale_block(j);
        std::uint64_t pos = (i / bj) * bj + bj;
        if (pos > n) pos = n;
        instr.probe();
        if (s <= a.at(pos - 1)) return j;
        if (pos == n) throw TargetBeyondArray();
    }
}

// Leftward mirror: smallest scale j whose aligned block start at or before
// position i bounds s from below (or reaches the front of the array).
template <class Arr>
int nls_left(const Arr& a, std::size_t i, Key s, Instrumentation& instr) {
    fd_require(a.size() > 0 && i >= 1 && i <= a.size(), "selection position out of range");
    for (int j = 0;; ++j) {
        const std::uint64_t bj = scale_block(j);
        const std::uint64_t start = ((i - 1) / bj) * bj + 1;
        if (start == 1) return j;
        instr.probe();
        if (s > a.at(start - 2)) return j;
    }
}

}  // namespace

int nested_level_select(std::span<const Key> a, std::size_t i, Key s, Instrumentation* instr) {
    Instrumentation scratch;
    return nls_right(SpanArr{a}, i, s, instr ? *instr : scratch);
}

// ---------------------------------------------------------------------------
// Growth.

const Leaf* NestedForest::append_leaf(Key k) {
    if (!leaves_.empty() && k <= leaves_.back()->key) throw KeyNotGreaterThanMax();
    auto owned = std::make_unique<Leaf>(k, leaves_.size() + 1);
    Leaf* lf = owned.get();
    leaves_.push_back(std::move(owned));
    instr().add_work();
    const std::uint64_t nu = leaves_.size();
    if (scales_.empty()) scales_.emplace_back();  // bootstrap hidden scale 0
    const int m_new = nu >= 2 ? capacity_height(nu) - 1 : -1;
    if (m_new > active_M_) {
        fd_require(m_new == active_M_ + 1, "capacity height must rise one step at a time");
        fd_require(static_cast<std::size_t>(m_new) < scales_.size(), "hidden scale missing at activation");
        fd_require(scales_[m_new].built == nu - 1, "hidden scale not fully prebuilt at activation");
        active_M_ = m_new;
        if (m_new + 1 <= 6 && scales_.size() == static_cast<std::size_t>(m_new) + 1) {
            scales_.emplace_back();
            scales_.back().m = m_new + 1;
        }
    }
    for (int s = 0; s <= active_M_; ++s) append_copy(scales_[s], lf);
    prebuild_slice();
    return lf;
}

void NestedForest::remove_tail_leaf() {
    if (leaves_.empty()) throw EmptyStructure();
    const std::uint64_t nu = leaves_.size();
    for (auto& sc : scales_)
        if (sc.built == nu) remove_copy(sc);
    leaves_.pop_back();
    instr().add_work();
    const std::uint64_t left = leaves_.size();
    const int m_new = left >= 2 ? capacity_height(left) - 1 : -1;
    if (m_new < active_M_) active_M_ = m_new;  // demote; the scale stays prebuilt
}

void NestedForest::append_copy(Scale& sc, Leaf* lf) {
    fd_require(sc.built + 1 == lf->rank, "copies must arrive in rank order");
    fd_require(sc.m >= 0 && sc.m < 8, "scale out of range");
    const std::uint64_t block = scale_block(sc.m);
    const std::uint64_t span = leaf_parent_span(sc.m);
    const std::uint64_t pos = lf->rank - 1;  // 0-based, blocks align to rank 1
    LevelNode* lp = nullptr;
    if (pos % block == 0) {
        auto root = std::make_unique<LevelNode>(sc.m, lf->rank, lf->key);
        LevelNode* rootp = root.get();
        if (!sc.roots.empty()) {
            sc.roots.back()->rnbr = rootp;
            rootp->lnbr = sc.roots.back().get();
        }
        if (sc.m == 0) {
            rootp->leaf_keys = std::make_unique<TailDynamicIndex>(
                TailDynamicIndex::kDefaultStepsPerUpdate, &instr());
            lp = rootp;
        } else {
            auto lpn = std::make_unique<LevelNode>(sc.m, lf->rank, lf->key);
            lpn->leaf_keys = std::make_unique<TailDynamicIndex>(
                TailDynamicIndex::kDefaultStepsPerUpdate, &instr());
            lpn->parent = rootp;
            if (sc.tail_leaf_parent) {
                sc.tail_leaf_parent->rnbr = lpn.get();
                lpn->lnbr = sc.tail_leaf_parent;
            }
            lp = lpn.get();
            rootp->maxs.push_back(lf->key);
            rootp->kids.push_back(std::move(lpn));
            instr().add_work();
        }
        sc.roots.push_back(std::move(root));
        instr().add_work();
    } else if (pos % span == 0) {
        fd_require(sc.m >= 1 && !sc.roots.empty(), "sub-block boundary outside an open tree");
        LevelNode* rootp = sc.roots.back().get();
        auto lpn = std::make_unique<LevelNode>(sc.m, lf->rank, lf->key);
        lpn->leaf_keys = std::make_unique<TailDynamicIndex>(
            TailDynamicIndex::kDefaultStepsPerUpdate, &instr());
        lpn->parent = rootp;
        fd_require(sc.tail_leaf_parent != nullptr, "tail leaf parent missing");
        sc.tail_leaf_parent->rnbr = lpn.get();
        lpn->lnbr = sc.tail_leaf_parent;
        lp = lpn.get();
        rootp->maxs.push_back(lf->key);
        rootp->kids.push_back(std::move(lpn));
        instr().add_work();
    } else {
        lp = sc.tail_leaf_parent;
        fd_require(lp != nullptr, "tail leaf parent missing");
    }
    lp->leaf_keys->append_tail(lf->key);
    if (sc.m >= 1) lp->parent->maxs.back() = lf->key;  // tail max updates in place
    lf->copy_parent[sc.m] = lp;
    sc.tail_leaf_parent = lp;
    sc.built = lf->rank;
}

void NestedForest::remove_copy(Scale& sc) {
    LevelNode* lp = sc.tail_leaf_parent;
    fd_require(lp != nullptr && sc.built >= 1, "no tail copy to remove");
    Leaf* lf = leaves_[sc.built - 1].get();
    fd_require(lf->copy_parent[sc.m] == lp, "tail copy out of sync");
    lf->copy_parent[sc.m] = nullptr;
    lp->leaf_keys->remove_tail();
    if (lp->leaf_keys->size() == 0) {
        if (lp->lnbr) lp->lnbr->rnbr = nullptr;
        if (sc.m == 0) {
            fd_require(sc.roots.back().get() == lp, "tail tree out of sync");
            sc.roots.pop_back();
        } else {
            LevelNode* rootp = lp->parent;
            fd_require(rootp->kids.back().get() == lp, "tail leaf parent out of sync");
            rootp->kids.pop_back();
            rootp->maxs.pop_back();
            if (rootp->kids.empty()) {
                if (rootp->lnbr) rootp->lnbr->rnbr = nullptr;
                fd_require(sc.roots.back().get() == rootp, "tail tree out of sync");
                sc.roots.pop_back();
            }
        }
        instr().add_work();
    } else if (sc.m >= 1) {
        lp->parent->maxs.back() = lp->leaf_keys->back();
    }
    sc.built -= 1;
    sc.tail_leaf_parent =
        sc.built == 0 ? nullptr : leaves_[sc.built - 1]->copy_parent[sc.m];
    instr().add_work();
}

void NestedForest::prebuild_slice() {
    const std::uint64_t nu = leaves_.size();
    int steps = kPrebuildStepsPerUpdate;
    for (std::size_t s = static_cast<std::size_t>(active_M_ + 1);
         s < scales_.size() && steps > 0; ++s) {
        while (steps > 0 && scales_[s].built < nu) {
            append_copy(scales_[s], leaves_[scales_[s].built].get());
            --steps;
        }
    }
}

// ---------------------------------------------------------------------------
// Search.

Key NestedForest::node_max(const LevelNode* node) const {
    return node->is_leaf_parent() ? node->leaf_keys->back() : node->maxs.back();
}

const Leaf* NestedForest::leftmost_under(const LevelNode* node) const {
    return leaves_[node->start_rank - 1].get();
}

const Leaf* NestedForest::rightmost_under(const LevelNode* node) const {
    const LevelNode* n = node;
    while (!n->is_leaf_parent()) n = n->kids.back().get();
    return leaves_[n->start_rank - 1 + n->leaf_keys->size() - 1].get();
}

const LevelNode* NestedForest::root_at(const Leaf* lf, int t) const {
    const LevelNode* lp = lf->copy_parent[t];
    fd_require(lp != nullptr, "missing copy at an active scale");
    return t == 0 ? lp : lp->parent;
}

const Leaf* NestedForest::resolve_in(const LevelNode* lp, Key s) const {
    auto hit = lp->leaf_keys->predecessor(s);
    fd_require(hit.has_value(), "resolution reached a node with no predecessor");
    return leaves_[lp->start_rank - 1 + hit->position - 1].get();
}

int NestedForest::select_right(const LevelNode* lp, std::size_t i, Key s) const {
    return nls_right(*lp->leaf_keys, i, s, instr());
}

int NestedForest::select_left(const LevelNode* lp, std::size_t i, Key s) const {
    return nls_left(*lp->leaf_keys, i, s, instr());
}

NestedForest::Descent NestedForest::descend_step(const LevelNode* root, Key s) const {
    fd_require(!root->is_leaf_parent(), "descend needs an interior node");
    const std::size_t p = lower_rank(root->maxs, s, instr());
    if (p == root->kids.size()) return {rightmost_under(root), nullptr, true};
    const LevelNode* child = root->kids[p].get();
    instr().probe();
    if (s < child->min_key) {
        // s falls in the gap before this child; the predecessor is the last
        // key of whatever precedes it, possibly across a tree boundary.
        if (p > 0) return {rightmost_under(root->kids[p - 1].get()), nullptr, true};
        if (!root->lnbr) return {nullptr, nullptr, true};  // below the global minimum
        return {rightmost_under(root->lnbr), nullptr, true};
    }
    return {nullptr, child, false};
}

const Leaf* NestedForest::pred_leaf(const Leaf* finger, Key s) const {
    fd_require(finger != nullptr, "null finger");
    fd_require(!leaves_.empty(), "search on an empty forest");
    const Leaf* cur = finger;
    if (active_M_ < 0) {  // single element
        if (cur->key == s) return cur;  // zero distance, uncounted
        instr().probe();
        return cur->key <= s ? cur : nullptr;
    }
    int cs = 0;
    bool entry = true;
    for (int iter = 0; iter < 10000; ++iter) {
        if (!entry) instr().probe();  // direction / equality re-evaluation
        entry = false;
        if (cur->key == s) return cur;
        const bool right = s > cur->key;
        const LevelNode* w = cur->copy_parent[cs];
        fd_require(w != nullptr, "finger lacks a copy at an active scale");
        instr().probe();
        const bool covered = right ? s <= node_max(w) : s >= w->min_key;
        if (covered) {
            if (cs == 0) return resolve_in(w, s);
            const std::size_t i = cur->rank - w->start_rank + 1;
            const int j = right ? select_right(w, i, s) : select_left(w, i, s);
            fd_require(j < cs, "routing selection must shrink the scale");
            cs = j;
            continue;
        }
        // Ascend: this leaf parent, then the roots of scales cs..M.  A root
        // and the leaf parent one scale up share a span, so those are skipped.
        const LevelNode* node = w;
        int t = cs;
        bool root_level = (cs == 0);  // a scale-0 leaf parent is its own root
        bool jumped = false;
        while (true) {
            const LevelNode* nb = right ? node->rnbr : node->lnbr;
            if (nb != nullptr) {
                if (right) {
                    instr().probe();
                    if (s < nb->min_key) return rightmost_under(node);  // gap
                    instr().probe();
                    if (s < node_max(nb)) {  // strict neighbor shortcut
                        if (nb->is_leaf_parent()) {
                            cur = leftmost_under(nb);
                        } else {
                            Descent d = descend_step(nb, s);
                            if (d.resolved) return d.done;
                            cur = leftmost_under(d.child);
                        }
                        cs = t;
                        jumped = true;
                        break;
                    }
                } else {
                    instr().probe();
                    if (s > node_max(nb)) return rightmost_under(nb);  // gap
                    instr().probe();
                    if (s > nb->min_key) {
                        if (nb->is_leaf_parent()) {
                            cur = rightmost_under(nb);
                        } else {
                            Descent d = descend_step(nb, s);
                            if (d.resolved) return d.done;
                            cur = leftmost_under(d.child);
                        }
                        cs = t;
                        jumped = true;
                        break;
                    }
                }
            } else {
                // Nothing on this side at this level: s is beyond every key
                // in that direction.
                if (right) return rightmost_under(node);
                return nullptr;
            }
            // Climb one effective level.
            if (!root_level) {
                node = node->parent;
                fd_require(node != nullptr, "leaf parent without a root");
                root_level = true;
            } else {
                fd_require(t < active_M_, "cannot climb past the top scale");
                ++t;
                node = root_at(cur, t);
            }
            instr().probe();
            const bool cov = right ? s <= node_max(node) : s >= node->min_key;
            if (cov) {  // turnaround
                Descent d = descend_step(node, s);
                if (d.resolved) return d.done;
                cur = leftmost_under(d.child);
                cs = t;
                jumped = true;
                break;
            }
        }
        fd_require(jumped, "ascent must jump or resolve");
    }
    fd_require(false, "finger search failed to terminate");
    return nullptr;
}

const Leaf* NestedForest::fsearch(const Leaf* finger, Key s) const {
    const Leaf* hit = pred_leaf(finger, s);
    if (hit == nullptr || hit->key != s) throw KeyAbsent();
    return hit;
}

// ---------------------------------------------------------------------------
// Audit and accounting.

bool NestedForest::validate() const {
    const std::uint64_t nu = leaves_.size();
    for (std::uint64_t r = 1; r <= nu; ++r) {
        fd_require(leaves_[r - 1]->rank == r, "leaf rank mismatch");
        if (r >= 2) fd_require(leaves_[r - 1]->key > leaves_[r - 2]->key, "keys not strictly increasing");
    }
    const int expect_m = nu >= 2 ? capacity_height(nu) - 1 : -1;
    fd_require(active_M_ == expect_m, "active scale mismatch");
    fd_require(scales_.size() <= 7, "too many scales");
    for (std::size_t m = 0; m < scales_.size(); ++m) {
        const Scale& sc = scales_[m];
        fd_require(sc.m == static_cast<int>(m), "scale index mismatch");
        if (static_cast<int>(m) <= active_M_)
            fd_require(sc.built == nu, "active scale must cover every rank");
        else
            fd_require(sc.built <= nu, "hidden scale overbuilt");
        const std::uint64_t block = scale_block(static_cast<int>(m));
        const std::uint64_t span = leaf_parent_span(static_cast<int>(m));
        std::uint64_t rank = 1;
        const LevelNode* prev_root = nullptr;
        const LevelNode* prev_lp = nullptr;
        for (const auto& rootu : sc.roots) {
            const LevelNode* root = rootu.get();
            fd_require((root->start_rank - 1) % block == 0, "tree misaligned");
            fd_require(root->start_rank == rank, "tree start out of order");
            fd_require(root->lnbr == prev_root, "root chain back link");
            if (prev_root) fd_require(prev_root->rnbr == root, "root chain forward link");
            fd_require(root->min_key == leaves_[root->start_rank - 1]->key, "root min key");
            std::vector<const LevelNode*> lps;
            if (m == 0) {
                fd_require(root->is_leaf_parent() && root->kids.empty() && root->maxs.empty(),
                           "scale-0 node shape");
                lps.push_back(root);
            } else {
                fd_require(!root->is_leaf_parent() && !root->kids.empty() &&
                               root->kids.size() == root->maxs.size(),
                           "root shape");
                for (const auto& kid : root->kids) lps.push_back(kid.get());
            }
            for (std::size_t ci = 0; ci < lps.size(); ++ci) {
                const LevelNode* lp = lps[ci];
                fd_require(lp->is_leaf_parent(), "leaf parent shape");
                fd_require((lp->start_rank - 1) % span == 0, "leaf parent misaligned");
                fd_require(lp->start_rank == rank, "leaf parent start out of order");
                fd_require(lp->parent == (m == 0 ? nullptr : root), "parent link");
                fd_require(lp->lnbr == prev_lp, "leaf parent chain back link");
                if (prev_lp) fd_require(prev_lp->rnbr == lp, "leaf parent chain forward link");
                const std::size_t cnt = lp->leaf_keys->size();
                fd_require(cnt >= 1 && cnt <= span, "leaf parent occupancy");
                fd_require(lp->min_key == leaves_[lp->start_rank - 1]->key, "leaf parent min key");
                for (std::size_t q = 0; q < cnt; ++q) {
                    const Leaf* lf = leaves_[lp->start_rank - 1 + q].get();
                    fd_require(lp->leaf_keys->at(q) == lf->key, "routing entry mismatch");
                    fd_require(lf->copy_parent[m] == lp, "copy back-pointer mismatch");
                }
                if (m >= 1) fd_require(root->maxs[ci] == lp->leaf_keys->back(), "stale root max");
                rank += cnt;
                prev_lp = lp;
            }
            prev_root = root;
        }
        fd_require(rank - 1 == sc.built, "built count mismatch");
        if (prev_root) fd_require(prev_root->rnbr == nullptr, "dangling root chain");
        if (prev_lp) fd_require(prev_lp->rnbr == nullptr, "dangling leaf parent chain");
        fd_require(sc.tail_leaf_parent == prev_lp, "tail cache stale");
        for (std::uint64_t r = sc.built + 1; r <= nu; ++r)
            fd_require(leaves_[r - 1]->copy_parent[m] == nullptr, "copy pointer above built prefix");
    }
    return true;
}

SpaceReport NestedForest::space() const {
    SpaceReport rep;
    rep.leaves = leaves_.size();
    for (const auto& sc : scales_) {
        rep.copy_links += sc.built;
        for (const auto& rootu : sc.roots) {
            rep.nodes += 1;
            rep.routing_entries += rootu->maxs.size();
            if (rootu->is_leaf_parent()) rep.routing_entries += rootu->leaf_keys->size();
            for (const auto& kid : rootu->kids) {
                rep.nodes += 1;
                rep.routing_entries += kid->leaf_keys->size();
            }
        }
    }
    return rep;
}

}  // namespace fingerdict
