#ifndef FINGERDICT_BUDGETS_HPP
#define FINGERDICT_BUDGETS_HPP

// Declared work budgets, in instrumentation work units (see common.hpp).
// Tests assert the measured maxima against these constants; the constants
// are part of the library's contract, not tuning knobs, so widening one to
// make a test pass requires revisiting the spread machinery instead.

#include <cstdint>

namespace fingerdict {

// One raw forest append: per-scale flat-array append (<= 8 units each,
// spread by TailDynamicIndex), tail routing updates, node creations, and a
// four-step prebuild slice for the hidden scale.
inline constexpr std::uint64_t kForestAppendWorkBudget = 128;

// One raw forest tail removal: per-scale array pop plus node teardown.
inline constexpr std::uint64_t kForestRemoveWorkBudget = 96;

// Amortized forest append work: total work over m appends stays below
// kForestAppendAmortized * m.
inline constexpr std::uint64_t kForestAppendAmortized = 64;

// One tail-dictionary update (insert_tail / delete_tail), including the paid
// slice of any pending representative job and global-rebuild catch-up steps.
inline constexpr std::uint64_t kTailUpdateWorkBudget = 256;

// Amortized tail-dictionary insert work, total over m inserts <= C * m.
inline constexpr std::uint64_t kTailInsertAmortized = 64;

// Counted cells (bucket cells + forest nodes + routing entries + copy links)
// per stored key in the tail dictionary.
inline constexpr std::uint64_t kTailSpaceCellsPerKey = 8;

// Amortized randomized-dictionary update work: total over m finger inserts
// and deletes <= C * m at steady state, independent of n.  Covers the
// bucket-local edit plus the amortized share of maintenance rebalances.
inline constexpr std::uint64_t kRandUpdateAmortized = 96;

}  // namespace fingerdict

#endif
