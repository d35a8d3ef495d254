#include "fingerdict/oracle.hpp"

#include <algorithm>

namespace fingerdict {

OracleDict OracleDict::bulk_load(std::vector<Key> sorted, Instrumentation* instr) {
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i] <= sorted[i - 1]) throw NotSorted();
    OracleDict d(instr);
    d.keys_ = std::move(sorted);
    return d;
}

OracleHit OracleDict::finger_search(std::uint64_t finger, Key s) const {
    if (keys_.empty()) throw EmptyStructure();
    fd_require(finger >= 1 && finger <= keys_.size(), "finger rank out of range");
    Instrumentation& I = instr();
    const std::uint64_t n = keys_.size();
    const std::uint64_t f = finger - 1;  // 0-based
    I.probe();
    if (keys_[f] == s) return {finger, 0};
    I.probe();
    std::uint64_t pos;  // 0-based predecessor index + 1, 0 when none
    if (s > keys_[f]) {
        // Gallop right: grow the bracket until a key exceeds s.
        std::uint64_t lo = f;  // keys_[lo] <= s
        std::uint64_t step = 1;
        std::uint64_t hi = n;  // exclusive; keys_[hi] > s when hi < n
        while (f + step < n) {
            I.probe();
            if (keys_[f + step] <= s) {
                lo = f + step;
                step *= 2;
            } else {
                hi = f + step;
                break;
            }
        }
        // Binary search in (lo, hi) for the last key <= s.
        std::uint64_t a = lo + 1, b = hi;
        while (a < b) {
            const std::uint64_t mid = a + (b - a) / 2;
            I.probe();
            if (keys_[mid] <= s) a = mid + 1; else b = mid;
        }
        pos = a;  // count of keys <= s in [0, hi)
    } else {
        // Gallop left: find a key at or below s.
        if (f == 0) return {0, 1};  // everything right of s… finger is minimum and exceeds s
        std::uint64_t hi = f;  // exclusive bound; keys_[hi] > s
        std::uint64_t step = 1;
        std::uint64_t lo = 0;
        bool found = false;
        while (true) {
            const std::uint64_t idx = step <= f ? f - step : 0;
            I.probe();
            if (keys_[idx] <= s) {
                lo = idx;
                found = true;
                break;
            }
            hi = idx;
            if (idx == 0) break;
            step *= 2;
        }
        if (!found) return {0, finger};  // s is below the minimum
        // Binary search in (lo, hi) for the last key <= s.
        std::uint64_t a = lo + 1, b = hi;
        while (a < b) {
            const std::uint64_t mid = a + (b - a) / 2;
            I.probe();
            if (keys_[mid] <= s) a = mid + 1; else b = mid;
        }
        pos = a;
    }
    const std::uint64_t d = pos >= finger ? pos - finger : finger - pos;
    return {pos, d};
}

std::uint64_t OracleDict::insert(Key k) {
    auto it = std::lower_bound(keys_.begin(), keys_.end(), k);
    if (it != keys_.end() && *it == k) throw DuplicateKey();
    instr().add_work();
    const std::uint64_t pos = static_cast<std::uint64_t>(it - keys_.begin()) + 1;
    keys_.insert(it, k);
    return pos;
}

void OracleDict::erase(Key k) {
    auto it = std::lower_bound(keys_.begin(), keys_.end(), k);
    if (it == keys_.end() || *it != k) throw KeyAbsent();
    instr().add_work();
    keys_.erase(it);
}

}  // namespace fingerdict
