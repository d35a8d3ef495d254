#include "fingerdict/randomized_dict.hpp"

#include <algorithm>

#include "fingerdict/predecessor_index.hpp"
#include "fingerdict/schedule.hpp"

namespace fingerdict {

namespace {

// Count of keys <= x; comparisons are structural effort, not probes.
std::size_t work_pred(const std::vector<Key>& keys, Key x, Instrumentation& I) {
    std::size_t lo = 0, hi = keys.size();
    while (lo < hi) {
        std::size_t mid = lo + (hi - lo) / 2;
        I.add_work();
        if (keys[mid] <= x) lo = mid + 1; else hi = mid;
    }
    return lo;
}

}  // namespace

RandomizedFingerDict::RandomizedFingerDict(std::uint64_t seed, Instrumentation* instr)
    : ext_(instr), tree_(&this->instr()), rng_(seed) {
    last_target_ = bucket_target();
}

RandomizedFingerDict::~RandomizedFingerDict() {
    for (RBucket* b : live_buckets_) delete b;
}

std::uint64_t RandomizedFingerDict::bucket_target() const {
    return r_bucket_target(n_max_);
}

std::uint64_t RandomizedFingerDict::cadence() const {
    return std::max<std::uint64_t>(2, kAlpha * ceil_loglog(std::max<std::uint64_t>(n_max_, 4)));
}

double RandomizedFingerDict::criticality_of_size(std::uint64_t bucket_size) const {
    const double target = double(bucket_target());
    const double sz = double(bucket_size);
    const double over = sz - kOverfullFrac * target;
    const double under = kUnderfullFrac * target - sz;
    const double num = std::max({0.0, under, over});
    const double den = double(kAlpha * ceil_loglog(std::max<std::uint64_t>(n_max_, 4)));
    return num / den;
}

double RandomizedFingerDict::criticality(const RBucket* b) const {
    return criticality_of_size(b->keys.size());
}

RandomizedFingerDict::Slot& RandomizedFingerDict::live_slot(std::uint64_t handle) {
    if (handle == 0 || handle > registry_.size())
        throw StaleFinger("handle does not name an element");
    Slot& s = registry_[handle - 1];
    if (!s.alive) throw StaleFinger("handle names a deleted element");
    return s;
}

const RandomizedFingerDict::Slot& RandomizedFingerDict::live_slot(std::uint64_t handle) const {
    return const_cast<RandomizedFingerDict*>(this)->live_slot(handle);
}

RandomizedFingerDict::RBucket* RandomizedFingerDict::bucket_of_leaf(const TopLeaf* lf) const {
    return static_cast<RBucket*>(lf->payload);
}

RandomizedFingerDict::RBucket* RandomizedFingerDict::left_of(const RBucket* b) const {
    return b->rep->prev ? bucket_of_leaf(b->rep->prev) : nullptr;
}

RandomizedFingerDict::RBucket* RandomizedFingerDict::right_of(const RBucket* b) const {
    return b->rep->next ? bucket_of_leaf(b->rep->next) : nullptr;
}

Key RandomizedFingerDict::key_of(std::uint64_t handle) const { return live_slot(handle).key; }

bool RandomizedFingerDict::alive(std::uint64_t handle) const {
    return handle >= 1 && handle <= registry_.size() && registry_[handle - 1].alive;
}

std::uint64_t RandomizedFingerDict::insert_first(Key k) {
    Instrumentation& I = instr();
    if (n_ == 0) {
        RBucket* b = new RBucket;
        live_buckets_.insert(b);
        b->keys.push_back(k);
        b->slots.push_back(registry_.size() + 1);
        registry_.push_back(Slot{k, b, true});
        b->rep = tree_.insert(k, b);
        I.add_work();
        n_ = 1;
        after_update(b);
        return registry_.size();
    }
    RBucket* b = bucket_of_leaf(tree_.leftmost());
    I.add_work();
    if (k == b->keys.front()) throw DuplicateKey("insert_first: key already present");
    if (k > b->keys.front())
        throw KeyOutOfFingerRange("insert_first: key not below the current minimum");
    b->keys.insert(b->keys.begin(), k);
    b->slots.insert(b->slots.begin(), registry_.size() + 1);
    registry_.push_back(Slot{k, b, true});
    I.add_work(b->keys.size());
    tree_.set_key(b->rep, k);
    ++n_;
    after_update(b);
    return registry_.size();
}

std::uint64_t RandomizedFingerDict::insert_at(std::uint64_t finger, Key k) {
    Instrumentation& I = instr();
    Slot& fs = live_slot(finger);
    RBucket* b = fs.bucket;
    const std::size_t pos = work_pred(b->keys, fs.key, I);
    fd_require(pos >= 1 && b->keys[pos - 1] == fs.key, "slot key missing from its bucket");
    bool have_succ = false;
    Key succ = 0;
    if (pos < b->keys.size()) {
        have_succ = true;
        succ = b->keys[pos];
    } else if (RBucket* r = right_of(b)) {
        have_succ = true;
        succ = r->keys.front();
    }
    I.add_work();
    if (k == fs.key || (have_succ && k == succ))
        throw DuplicateKey("insert_at: key already present");
    if (k < fs.key || (have_succ && k > succ))
        throw KeyOutOfFingerRange("insert_at: key not between the finger and its successor");
    b->keys.insert(b->keys.begin() + pos, k);
    b->slots.insert(b->slots.begin() + pos, registry_.size() + 1);
    registry_.push_back(Slot{k, b, true});
    I.add_work(b->keys.size() - pos + 1);
    ++n_;
    after_update(b);
    return registry_.size();
}

void RandomizedFingerDict::delete_at(std::uint64_t handle) {
    Instrumentation& I = instr();
    Slot& s = live_slot(handle);
    RBucket* b = s.bucket;
    const std::size_t pos = work_pred(b->keys, s.key, I);
    fd_require(pos >= 1 && b->keys[pos - 1] == s.key, "slot key missing from its bucket");
    b->keys.erase(b->keys.begin() + pos - 1);
    b->slots.erase(b->slots.begin() + pos - 1);
    I.add_work(b->keys.size() - (pos - 1) + 1);
    s.alive = false;
    --n_;
    if (b->keys.empty()) {
        tree_.erase(b->rep);
        live_buckets_.erase(b);
        delete b;
        b = nullptr;
    } else if (pos == 1) {
        tree_.set_key(b->rep, b->keys.front());  // representative follows the minimum
    }
    after_update(b);
}

std::uint64_t RandomizedFingerDict::pred_slot_in(const RBucket* b, Key s) const {
    const std::size_t r =
        pred_rank(std::span<const Key>(b->keys.data(), b->keys.size()), s, instr());
    fd_require(r >= 1, "bucket scan entered below the bucket minimum");
    return b->slots[r - 1];
}

std::uint64_t RandomizedFingerDict::pred_search(std::uint64_t finger, Key s) const {
    Instrumentation& I = instr();
    const Slot& fs = live_slot(finger);
    const RBucket* b = fs.bucket;
    I.probe(2);
    if (s >= b->keys.front() && s <= b->keys.back()) return pred_slot_in(b, s);
    const TopLeaf* hit = tree_.finger_search(b->rep, s);
    if (hit == nullptr) return 0;  // below the global minimum
    return pred_slot_in(bucket_of_leaf(hit), s);
}

std::uint64_t RandomizedFingerDict::finger_search(std::uint64_t finger, Key k) const {
    const std::uint64_t h = pred_search(finger, k);
    instr().probe();
    if (h == 0 || registry_[h - 1].key != k)
        throw KeyAbsent("finger_search: key not present");
    return h;
}

void RandomizedFingerDict::note_size_change(RBucket* b) {
    const double rho = criticality(b);
    if (rho > 0)
        heap_.push(HeapEntry{rho, b->keys.front(), b->keys.size(), bucket_target(), b});
}

void RandomizedFingerDict::log_event(std::uint8_t source, MaintAction action) {
    events_.push_back(MaintEvent{updates_seen_, source, action});
}

void RandomizedFingerDict::after_update(RBucket* touched) {
    ++updates_seen_;
    n_max_ = std::max(n_max_, n_);
    if (bucket_target() != last_target_) {
        last_target_ = bucket_target();
        sweep_after_target_change();
        if (touched && live_buckets_.count(touched) == 0) touched = nullptr;
    }
    if (window_len_ == 0) window_len_ = cadence();
    window_.push_back(touched);
    if (touched) {
        note_size_change(touched);
        const std::uint64_t target = bucket_target();
        const std::uint64_t sz = touched->keys.size();
        const bool overfull_guard = sz >= 2 * target;
        const bool underfull_guard = 2 * sz < target && live_buckets_.size() > 1;
        if (overfull_guard || underfull_guard) {
            ++guard_hits_;
            log_event(2, rebalance(touched));
        }
    }
    if (window_.size() >= window_len_) {
        maintenance_round();
        window_.clear();
        window_len_ = cadence();
    }
}

void RandomizedFingerDict::maintenance_round() {
    // Step 1: one uniformly drawn update from the window that just ended;
    // the bucket it touched is checked, which selects bucket i with
    // probability delta_i / c.
    MaintAction a1 = MaintAction::kNone;
    RBucket* drawn = window_[rng_.bounded(window_.size())];
    if (drawn && live_buckets_.count(drawn) > 0 && criticality(drawn) > 0)
        a1 = rebalance(drawn);
    log_event(0, a1);
    // Step 2: the most critical bucket, via the lazy heap.
    MaintAction a2 = MaintAction::kNone;
    int stale = 0;
    while (!heap_.empty()) {
        const HeapEntry top = heap_.top();
        const bool current = live_buckets_.count(top.bucket) > 0 &&
                             top.bucket->keys.size() == top.size_at &&
                             top.target_at == bucket_target();
        heap_.pop();
        if (!current) {
            if (++stale >= kMaxStaleHeapPops) break;  // bounded laziness
            continue;
        }
        if (top.rho > 0) a2 = rebalance(top.bucket);
        break;
    }
    log_event(1, a2);
}

void RandomizedFingerDict::sweep_after_target_change() {
    // The target only grows, so the risk is buckets now below half target
    // (or, defensively, at or above double).  One pass restores the hard
    // window; fusions may remove buckets collected earlier, hence the
    // liveness re-check.
    std::vector<RBucket*> snapshot;
    for (const TopLeaf* lf = tree_.leftmost(); lf; lf = lf->next)
        snapshot.push_back(bucket_of_leaf(lf));
    const std::uint64_t target = bucket_target();
    for (RBucket* b : snapshot) {
        if (live_buckets_.count(b) == 0) continue;
        const std::uint64_t sz = b->keys.size();
        const bool overfull_guard = sz >= 2 * target;
        const bool underfull_guard = 2 * sz < target && live_buckets_.size() > 1;
        if (overfull_guard || underfull_guard) {
            ++guard_hits_;
            log_event(3, rebalance(b));
        }
    }
}

MaintAction RandomizedFingerDict::rebalance(RBucket* b) {
    MaintAction first = MaintAction::kNone;
    RBucket* cur = b;
    for (int iter = 0;; ++iter) {
        fd_require(iter < 64, "rebalance failed to converge");
        const double target = double(bucket_target());
        const double sz = double(cur->keys.size());
        if (sz > kOverfullFrac * target) {
            RBucket* right = split(cur);
            if (first == MaintAction::kNone) first = MaintAction::kSplit;
            fd_require(criticality(cur) == 0.0 && criticality(right) == 0.0,
                       "split left a critical bucket");
            return first;
        }
        if (sz < kUnderfullFrac * target) {
            if (live_buckets_.size() <= 1) return first;  // small-dictionary exemption
            RBucket* l = left_of(cur);
            RBucket* r = right_of(cur);
            auto donor_works = [&](RBucket* d) {
                return d && equalize_feasible(cur->keys.size(), d->keys.size(), bucket_target());
            };
            if (donor_works(l) || donor_works(r)) {
                RBucket* donor = donor_works(l) ? l : r;
                transfer(cur, donor, donor == l);
                if (first == MaintAction::kNone) first = MaintAction::kTransfer;
                fd_require(criticality(cur) == 0.0 && criticality(donor) == 0.0,
                           "transfer left a critical bucket");
                return first;
            }
            RBucket* into = l ? l : r;
            fd_require(into != nullptr, "underfull bucket with no neighbour");
            cur = fuse(cur, into, into == l);
            if (first == MaintAction::kNone) first = MaintAction::kFuse;
            continue;  // the fused bucket may itself need splitting or more fuel
        }
        fd_require(criticality(cur) == 0.0, "rebalance left a critical bucket");
        return first;
    }
}

std::pair<std::uint64_t, std::uint64_t> RandomizedFingerDict::split_shares(std::uint64_t size) {
    return {(size + 1) / 2, size / 2};  // left keeps the ceil half
}

std::pair<std::uint64_t, std::uint64_t> RandomizedFingerDict::equalize_shares(
    std::uint64_t deficient, std::uint64_t donor) {
    const std::uint64_t total = deficient + donor;
    return {(total + 1) / 2, total / 2};  // deficient share first
}

bool RandomizedFingerDict::equalize_feasible(std::uint64_t deficient, std::uint64_t donor,
                                             std::uint64_t target) {
    if (double(donor) < double(target)) return false;  // donor must be at target fullness
    return double(equalize_shares(deficient, donor).second) >= kUnderfullFrac * double(target);
}

RandomizedFingerDict::RBucket* RandomizedFingerDict::split(RBucket* b) {
    Instrumentation& I = instr();
    const std::size_t keep = split_shares(b->keys.size()).first;
    RBucket* right = new RBucket;
    live_buckets_.insert(right);
    right->keys.assign(b->keys.begin() + keep, b->keys.end());
    right->slots.assign(b->slots.begin() + keep, b->slots.end());
    b->keys.resize(keep);
    b->slots.resize(keep);
    for (std::uint64_t id : right->slots) registry_[id - 1].bucket = right;
    I.add_work(right->keys.size());
    right->rep = tree_.insert(right->keys.front(), right);
    note_size_change(b);
    note_size_change(right);
    return right;
}

void RandomizedFingerDict::transfer(RBucket* deficient, RBucket* donor, bool donor_is_left) {
    Instrumentation& I = instr();
    const std::uint64_t want = equalize_shares(deficient->keys.size(), donor->keys.size()).first;
    fd_require(want > deficient->keys.size(), "transfer with nothing to move");
    const std::size_t m = want - deficient->keys.size();
    if (donor_is_left) {
        deficient->keys.insert(deficient->keys.begin(), donor->keys.end() - m, donor->keys.end());
        deficient->slots.insert(deficient->slots.begin(), donor->slots.end() - m,
                                donor->slots.end());
        donor->keys.resize(donor->keys.size() - m);
        donor->slots.resize(donor->slots.size() - m);
        for (std::size_t i = 0; i < m; ++i) registry_[deficient->slots[i] - 1].bucket = deficient;
        tree_.set_key(deficient->rep, deficient->keys.front());
    } else {
        deficient->keys.insert(deficient->keys.end(), donor->keys.begin(), donor->keys.begin() + m);
        deficient->slots.insert(deficient->slots.end(), donor->slots.begin(),
                                donor->slots.begin() + m);
        donor->keys.erase(donor->keys.begin(), donor->keys.begin() + m);
        donor->slots.erase(donor->slots.begin(), donor->slots.begin() + m);
        const std::size_t base = deficient->slots.size() - m;
        for (std::size_t i = 0; i < m; ++i)
            registry_[deficient->slots[base + i] - 1].bucket = deficient;
        tree_.set_key(donor->rep, donor->keys.front());
    }
    I.add_work(m + deficient->keys.size());
    note_size_change(deficient);
    note_size_change(donor);
}

RandomizedFingerDict::RBucket* RandomizedFingerDict::fuse(RBucket* gone, RBucket* into,
                                                          bool into_is_left) {
    Instrumentation& I = instr();
    const bool min_moves = !into_is_left;
    if (into_is_left) {
        into->keys.insert(into->keys.end(), gone->keys.begin(), gone->keys.end());
        into->slots.insert(into->slots.end(), gone->slots.begin(), gone->slots.end());
    } else {
        into->keys.insert(into->keys.begin(), gone->keys.begin(), gone->keys.end());
        into->slots.insert(into->slots.begin(), gone->slots.begin(), gone->slots.end());
    }
    for (std::uint64_t id : gone->slots) registry_[id - 1].bucket = into;
    I.add_work(gone->keys.size() + 1);
    tree_.erase(gone->rep);  // before the rekey: the old rep holds the key we take over
    if (min_moves) tree_.set_key(into->rep, into->keys.front());
    live_buckets_.erase(gone);
    delete gone;
    note_size_change(into);
    return into;
}

std::vector<std::uint64_t> RandomizedFingerDict::bucket_sizes() const {
    std::vector<std::uint64_t> out;
    for (const TopLeaf* lf = tree_.leftmost(); lf; lf = lf->next)
        out.push_back(bucket_of_leaf(lf)->keys.size());
    return out;
}

bool RandomizedFingerDict::validate() const {
    tree_.validate();
    fd_require(live_buckets_.size() == tree_.size(), "bucket count out of step with tree");
    const std::uint64_t target = bucket_target();
    std::uint64_t counted = 0;
    Key prev = 0;
    bool have_prev = false;
    for (const TopLeaf* lf = tree_.leftmost(); lf; lf = lf->next) {
        const RBucket* b = bucket_of_leaf(lf);
        fd_require(live_buckets_.count(const_cast<RBucket*>(b)) > 0, "unknown bucket in tree");
        fd_require(b->rep == lf, "bucket does not point back at its leaf");
        fd_require(!b->keys.empty(), "empty bucket survived");
        fd_require(b->keys.size() == b->slots.size(), "key/slot column mismatch");
        fd_require(lf->key == b->keys.front(), "representative is not the bucket minimum");
        if (live_buckets_.size() > 1) {
            fd_require(b->keys.size() < 2 * target, "bucket at or above twice the target");
            fd_require(2 * b->keys.size() >= target, "bucket below half the target");
        } else {
            fd_require(b->keys.size() < 2 * target, "single bucket at or above twice the target");
        }
        for (std::size_t i = 0; i < b->keys.size(); ++i) {
            if (have_prev) fd_require(prev < b->keys[i], "keys not strictly increasing");
            prev = b->keys[i];
            have_prev = true;
            const std::uint64_t id = b->slots[i];
            fd_require(id >= 1 && id <= registry_.size(), "slot id out of range");
            const Slot& s = registry_[id - 1];
            fd_require(s.alive, "bucket references a retired slot");
            fd_require(s.key == b->keys[i], "slot key mismatch");
            fd_require(s.bucket == b, "slot bucket mismatch");
            ++counted;
        }
    }
    fd_require(counted == n_, "element count mismatch");
    std::uint64_t alive_slots = 0;
    for (const Slot& s : registry_)
        if (s.alive) ++alive_slots;
    fd_require(alive_slots == n_, "registry alive count mismatch");
    return true;
}

}  // namespace fingerdict
