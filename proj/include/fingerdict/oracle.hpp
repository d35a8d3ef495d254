#ifndef FINGERDICT_ORACLE_HPP
#define FINGERDICT_ORACLE_HPP

// Reference dictionary: a flat sorted vector with a galloping finger search.
// It is deliberately simple — correctness is obvious by inspection — and it
// serves as the differential baseline for the tree structures.  Probes obey
// the usual doubling bound: at most 2*ceil(log2(d+1)) + 4 comparisons for
// rank distance d, and at most 2 when the finger already sits on the target.

#include <cstdint>
#include <vector>

#include "fingerdict/common.hpp"

namespace fingerdict {

struct OracleHit {
    std::uint64_t position;  // 1-based rank of the predecessor; 0 when none exists
    std::uint64_t distance;  // |position - finger|, rank distance actually travelled
    bool operator==(const OracleHit&) const = default;
};

class OracleDict {
  public:
    explicit OracleDict(Instrumentation* instr = nullptr) : ext_(instr) {}

    static OracleDict bulk_load(std::vector<Key> sorted, Instrumentation* instr = nullptr);

    // Predecessor of s (largest key <= s), starting from the 1-based finger
    // rank and galloping outward.
    OracleHit finger_search(std::uint64_t finger, Key s) const;

    // Insert a new key; returns its 1-based position.  Throws DuplicateKey.
    std::uint64_t insert(Key k);

    // Remove a stored key; throws KeyAbsent.
    void erase(Key k);

    std::uint64_t size() const { return keys_.size(); }
    Key at(std::uint64_t pos) const { return keys_.at(pos - 1); }  // 1-based
    const std::vector<Key>& keys() const { return keys_; }
    Instrumentation& instr() const { return ext_ ? *ext_ : own_; }

  private:
    std::vector<Key> keys_;
    Instrumentation* ext_ = nullptr;
    mutable Instrumentation own_;
};

}  // namespace fingerdict

#endif
