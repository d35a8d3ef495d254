#include "fingerdict/bucket_layer.hpp"

#include <algorithm>

#include "fingerdict/budgets.hpp"
#include "fingerdict/predecessor_index.hpp"

namespace fingerdict {

TailFingerDict::TailFingerDict(Instrumentation* instr)
    : cap_(bucket_capacity(0)), ext_(instr) {
    forest_ = std::make_unique<NestedForest>(&this->instr());
}

TailFingerDict::TailFingerDict(std::uint32_t cap, Instrumentation* master)
    : cap_(cap), allow_rebuild_(false), ext_(master) {
    forest_ = std::make_unique<NestedForest>(master);
}

std::uint64_t TailFingerDict::insert_tail(Key k) {
    if (n_ > 0 && k <= buckets_.back().elems.back())
        throw KeyNotGreaterThanMax("insert_tail: key must exceed the current maximum");
    if (buckets_.empty() || buckets_.back().elems.size() == cap_) {
        // The previous bucket's representative job must have been funded and
        // executed by now; only the youngest bucket may be unrepresented.
        fd_require(!pending_job_, "opening a bucket with a representative job still pending");
        fd_require(forest_->size() == buckets_.size(),
                   "forest representative count out of step with bucket count");
        buckets_.emplace_back();
        pending_job_ = RepJob{buckets_.size() - 1, kForestAppendWorkBudget, 0};
        instr().add_work();
    }
    buckets_.back().elems.push_back(k);
    instr().add_work();
    ++n_;
    pay_pending_job();
    rebuild_step();
    maybe_trigger_rebuild();
    return n_;
}

void TailFingerDict::pay_pending_job() {
    if (!pending_job_) return;
    RepJob& job = *pending_job_;
    job.paid += (job.est + cap_ - 1) / cap_;
    instr().add_work();
    if (job.paid < job.est) return;
    // Funded: append the bucket's representative (its smallest key) whole.
    const Leaf* rep = forest_->append_leaf(buckets_[job.bucket_index].elems.front());
    fd_require(rep->rank == job.bucket_index + 1, "representative rank out of step");
    pending_job_.reset();
}

void TailFingerDict::delete_tail() {
    if (n_ == 0) throw EmptyStructure("delete_tail: structure is empty");
    buckets_.back().elems.pop_back();
    instr().add_work();
    if (buckets_.back().elems.empty()) {
        if (pending_job_) {
            fd_require(pending_job_->bucket_index == buckets_.size() - 1,
                       "pending job must belong to the youngest bucket");
            pending_job_.reset();  // representative never reached the forest
        } else {
            forest_->remove_tail_leaf();
        }
        buckets_.pop_back();
        instr().add_work();
    }
    --n_;
    if (shadow_ && rebuild_cursor_ == n_ + 1) {
        shadow_->delete_tail();
        --rebuild_cursor_;
    }
    rebuild_step();
    maybe_trigger_rebuild();
}

std::uint64_t TailFingerDict::scan_bucket(std::uint64_t bucket_index, Key s) const {
    const std::vector<Key>& e = buckets_[bucket_index].elems;
    std::size_t pos = pred_rank(std::span<const Key>(e.data(), e.size()), s, instr());
    fd_require(pos >= 1, "bucket scan entered with target below the bucket minimum");
    return bucket_index * cap_ + pos;
}

std::uint64_t TailFingerDict::search_star(std::uint64_t finger, Key s) const {
    if (finger == 0 || finger > n_)
        throw StaleFinger("search_star: finger handle does not name a live element");
    const std::uint64_t bf = bucket_of(finger);
    const std::vector<Key>& home = buckets_[bf].elems;
    // Same-bucket fast path: no forest involvement at all.
    instr().probe(2);
    if (s >= home.front() && s <= home.back()) return scan_bucket(bf, s);
    // Tail fast path.  The youngest bucket's representative may still be
    // pending, so the forest cannot vouch for it; an inclusive >= against its
    // smallest key routes every query it owns (and everything beyond the
    // global maximum) straight to a direct scan.
    instr().probe();
    if (s >= buckets_.back().elems.front()) return scan_bucket(buckets_.size() - 1, s);
    // Forest route: finger search across bucket representatives, starting at
    // the finger bucket's representative (or its elder neighbour's when the
    // finger sits in the still-unrepresented youngest bucket).
    std::uint64_t br = bf;
    if (pending_job_ && br == buckets_.size() - 1) {
        if (br == 0) return 0;  // single unrepresented bucket and s below its minimum
        --br;
    }
    const Leaf* hit = forest_->pred_leaf(forest_->leaf_at(br + 1), s);
    if (hit == nullptr) return 0;  // below the global minimum
    return scan_bucket(hit->rank - 1, s);
}

Key TailFingerDict::at(std::uint64_t rank) const {
    fd_require(rank >= 1 && rank <= n_, "at: rank out of range");
    return buckets_[bucket_of(rank)].elems[(rank - 1) % cap_];
}

void TailFingerDict::rebuild_step() {
    if (!shadow_) return;
    for (int i = 0; i < kRebuildCopiesPerUpdate && rebuild_cursor_ < n_; ++i) {
        ++rebuild_cursor_;
        shadow_->insert_tail(at(rebuild_cursor_));
    }
    if (rebuild_cursor_ == n_) {
        // Caught up: promote the shadow in O(1) and resume window sliding.
        fd_require(shadow_->size() == n_, "shadow size out of step at swap");
        buckets_ = std::move(shadow_->buckets_);
        forest_ = std::move(shadow_->forest_);
        pending_job_ = shadow_->pending_job_;
        cap_ = shadow_->cap_;
        shadow_.reset();
        rebuild_cursor_ = 0;
        n0_ = std::max<std::uint64_t>(n_, 1);
    }
}

void TailFingerDict::maybe_trigger_rebuild() {
    if (!allow_rebuild_ || shadow_) return;
    if (2 * n_ >= n0_ && n_ <= 2 * n0_) return;
    const std::uint32_t want = bucket_capacity(n_);
    if (want == cap_) {
        n0_ = std::max<std::uint64_t>(n_, 1);  // schedule agrees: slide the window
        return;
    }
    shadow_.reset(new TailFingerDict(want, &instr()));
    rebuild_cursor_ = 0;
    instr().add_work();
}

std::uint64_t TailFingerDict::counted_cells() const {
    // One cell per stored key plus one header cell per bucket.
    return n_ + buckets_.size() + forest_->space().total();
}

bool TailFingerDict::validate() const {
    std::uint64_t seen = 0;
    for (std::size_t i = 0; i < buckets_.size(); ++i) {
        const std::vector<Key>& e = buckets_[i].elems;
        fd_require(!e.empty(), "validate: empty bucket");
        if (i + 1 < buckets_.size())
            fd_require(e.size() == cap_, "validate: interior bucket not full");
        else
            fd_require(e.size() <= cap_, "validate: youngest bucket overfull");
        for (std::size_t j = 0; j < e.size(); ++j) {
            ++seen;
            fd_require(at(seen) == e[j], "validate: rank arithmetic mismatch");
            if (seen > 1) fd_require(at(seen - 1) < e[j], "validate: keys not increasing");
        }
    }
    fd_require(seen == n_, "validate: element count mismatch");
    const std::uint64_t represented = forest_->size();
    fd_require(represented + (pending_job_ ? 1 : 0) == buckets_.size(),
               "validate: representative count mismatch");
    if (pending_job_)
        fd_require(pending_job_->bucket_index == buckets_.size() - 1,
                   "validate: pending job not on the youngest bucket");
    for (std::uint64_t i = 0; i < represented; ++i)
        fd_require(forest_->leaf_at(i + 1)->key == buckets_[i].elems.front(),
                   "validate: representative key mismatch");
    forest_->validate();
    if (shadow_) {
        shadow_->validate();
        fd_require(shadow_->size() == rebuild_cursor_, "validate: rebuild cursor mismatch");
        for (std::uint64_t r = 1; r <= rebuild_cursor_; ++r)
            fd_require(shadow_->at(r) == at(r), "validate: shadow prefix mismatch");
    }
    return true;
}

}  // namespace fingerdict
