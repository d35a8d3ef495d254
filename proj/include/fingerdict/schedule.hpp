#ifndef FINGERDICT_SCHEDULE_HPP
#define FINGERDICT_SCHEDULE_HPP

// Size schedules shared by the structures.
//
// The tree family is defined by the recurrence
//     d(0) = 2, t(0) = 1, t(i) = t(i-1) * d(i-1), d(i) = t(i)
// which closes to d(i) = t(i) = 2^(2^(i-1)) for i >= 1.  degree_at is the
// fan-out of a node at level i, node_count_at the number of nodes (and the
// leaf capacity) at level i.  Values saturate at 2^63 instead of overflowing;
// levels that large are unreachable for 64-bit keys.

#include <cmath>
#include <cstdint>

#include "fingerdict/common.hpp"

namespace fingerdict {

inline constexpr std::uint64_t kSchedSaturated = 1ull << 63;

constexpr std::uint64_t degree_at(int level) {
    if (level == 0) return 2;
    if (level >= 7) return kSchedSaturated;   // 2^(2^6) = 2^64 would overflow
    return 1ull << (1ull << (level - 1));
}

constexpr std::uint64_t node_count_at(int level) {
    if (level == 0) return 1;
    return degree_at(level);                  // t(i) = d(i) for i >= 1
}

// Smallest height h whose leaf level can hold n keys; 0 for n <= 1.
constexpr int capacity_height(std::uint64_t n) {
    int h = 0;
    while (h < 7 && node_count_at(h) < n) ++h;  // t(7) = 2^64 covers any n
    return h;
}

// Aligned block size at scale m: 2^(2^m) leaf positions, saturating.
constexpr std::uint64_t scale_block(int m) { return node_count_at(m + 1); }

// Span of one leaf parent inside a scale-m tree: the sub-block one scale
// down (two leaves at scale 0, where the root is its own leaf parent).
constexpr std::uint64_t leaf_parent_span(int m) { return m == 0 ? 2 : scale_block(m - 1); }

// ceil(log2(log2(max(n, 4)))) without floating point: smallest k with
// 2^(2^k) >= n.
constexpr int ceil_loglog(std::uint64_t n) {
    if (n < 4) n = 4;
    int k = 0;
    while (k < 6 && scale_block(k) < n) ++k;  // 2^(2^6) = 2^64 covers any n
    return k;
}

// Tail-structure bucket capacity: max(4, ceil(log2 log2 max(n, 4))).
constexpr std::uint32_t bucket_capacity(std::uint64_t n) {
    int ll = ceil_loglog(n);
    return ll < 4 ? 4u : static_cast<std::uint32_t>(ll);
}

// Randomized-structure bucket target: max(8, ceil((log2 log2 max(n, 4))^2)).
// The square is taken before rounding, so this grows in finer steps than
// ceil_loglog squared.
inline std::uint64_t r_bucket_target(std::uint64_t n) {
    if (n < 4) n = 4;
    double ll = std::log2(std::log2(static_cast<double>(n)));
    auto target = static_cast<std::uint64_t>(std::ceil(ll * ll));
    return target < 8 ? 8 : target;
}

}  // namespace fingerdict

#endif
