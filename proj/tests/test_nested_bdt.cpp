#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "doctest.h"
#include "fingerdict/budgets.hpp"
#include "fingerdict/nested_bdt.hpp"

using namespace fingerdict;

namespace {

std::optional<Key> oracle_pred(const std::vector<Key>& keys, Key s) {
    auto it = std::upper_bound(keys.begin(), keys.end(), s);
    if (it == keys.begin()) return std::nullopt;
    return *(it - 1);
}

void check_pred(const NestedForest& f, const std::vector<Key>& keys, const Leaf* finger, Key s) {
    const Leaf* got = f.pred_leaf(finger, s);
    auto want = oracle_pred(keys, s);
    if (!want.has_value()) {
        CHECK(got == nullptr);
    } else {
        REQUIRE(got != nullptr);
        CHECK(got->key == *want);
    }
}

}  // namespace

TEST_CASE("routing selection fixed examples") {
    std::vector<Key> a{10, 20, 30, 40, 50, 60, 70, 80};
    Instrumentation instr;
    CHECK(nested_level_select(a, 3, 35, &instr) == 0);
    CHECK(instr.probe_count() == 1);
    instr.reset();
    CHECK(nested_level_select(a, 3, 55, &instr) == 2);
    CHECK(instr.probe_count() == 3);  // one probe per tried scale
    std::vector<Key> b{10, 20};
    CHECK(nested_level_select(b, 1, 20) == 0);
    CHECK_THROWS_AS(nested_level_select(b, 1, 21), TargetBeyondArray);
    CHECK_THROWS_AS(nested_level_select(a, 3, 81), TargetBeyondArray);
    CHECK(nested_level_select(a, 8, 80) == 0);  // tail position, clamped block
}

TEST_CASE("growth keeps the audit green and reports recurrence heights") {
    NestedForest f;
    CHECK(f.height() == 0);
    CHECK(f.nesting_depth() == 0);
    std::vector<Key> keys;
    for (std::uint64_t r = 1; r <= 70; ++r) {
        f.append_leaf(r * 10);
        keys.push_back(r * 10);
        CHECK(f.validate());
        CHECK(f.height() == capacity_height(r));
        CHECK(f.nesting_depth() == (r >= 2 ? capacity_height(r) - 1 : 0));
    }
    for (std::uint64_t r = 70; r-- > 0;) {
        f.remove_tail_leaf();
        CHECK(f.validate());
        CHECK(f.height() == capacity_height(r));
    }
    CHECK(f.size() == 0);
    CHECK_THROWS_AS(f.remove_tail_leaf(), EmptyStructure);
}

TEST_CASE("appends must exceed the maximum") {
    NestedForest f;
    f.append_leaf(100);
    CHECK_THROWS_AS(f.append_leaf(100), KeyNotGreaterThanMax);
    CHECK_THROWS_AS(f.append_leaf(99), KeyNotGreaterThanMax);
    f.append_leaf(101);
    CHECK(f.size() == 2);
}

TEST_CASE("oscillation around capacity thresholds") {
    NestedForest f;
    std::uint64_t next = 1;
    auto grow_to = [&](std::uint64_t n) {
        while (f.size() < n) { f.append_leaf(next * 7 + 3); ++next; }
    };
    auto shrink_to = [&](std::uint64_t n) {
        while (f.size() > n) { f.remove_tail_leaf(); --next; }
    };
    for (std::uint64_t pivot : {3ull, 5ull, 17ull, 257ull}) {
        grow_to(pivot + 2);
        for (int round = 0; round < 6; ++round) {
            shrink_to(pivot - 2);
            CHECK(f.validate());
            grow_to(pivot + 2);
            CHECK(f.validate());
        }
    }
    shrink_to(0);
    CHECK(f.validate());
}

TEST_CASE("exhaustive predecessor agreement on a small forest") {
    NestedForest f;
    std::vector<Key> keys;
    for (std::uint64_t r = 1; r <= 64; ++r) {
        keys.push_back(r * 10);
        f.append_leaf(r * 10);
    }
    REQUIRE(f.validate());
    for (std::uint64_t fr = 1; fr <= 64; ++fr) {
        const Leaf* finger = f.leaf_at(fr);
        for (Key s = 1; s <= 660; ++s) check_pred(f, keys, finger, s);
    }
}

TEST_CASE("exhaustive predecessor agreement near block boundaries") {
    for (std::uint64_t n : {1ull, 2ull, 3ull, 4ull, 5ull, 15ull, 16ull, 17ull, 31ull, 65ull}) {
        NestedForest f;
        std::vector<Key> keys;
        for (std::uint64_t r = 1; r <= n; ++r) {
            keys.push_back(r * 10);
            f.append_leaf(r * 10);
        }
        for (std::uint64_t fr = 1; fr <= n; ++fr) {
            const Leaf* finger = f.leaf_at(fr);
            for (Key s = 1; s <= (n + 2) * 10; ++s) check_pred(f, keys, finger, s);
        }
    }
}

TEST_CASE("randomized predecessor agreement on a large forest") {
    NestedForest f;
    SplitMix64 rng(0x5EED);
    std::vector<Key> keys;
    Key cur = 0;
    for (int r = 0; r < 3000; ++r) {
        cur += 1 + rng.bounded(17);
        keys.push_back(cur);
        f.append_leaf(cur);
    }
    REQUIRE(f.validate());
    for (int q = 0; q < 30000; ++q) {
        const Leaf* finger = f.leaf_at(1 + rng.bounded(keys.size()));
        Key s;
        switch (q % 4) {
            case 0: s = rng.bounded(cur + 20); break;
            case 1: s = keys[rng.bounded(keys.size())]; break;        // exact hits
            case 2: s = keys[rng.bounded(keys.size())] + 1; break;    // just above
            default: s = keys[rng.bounded(keys.size())] - 1; break;   // just below
        }
        check_pred(f, keys, finger, s);
    }
}

TEST_CASE("exact finger search") {
    NestedForest f;
    std::vector<Key> keys;
    SplitMix64 rng(12);
    Key cur = 100;
    for (int r = 0; r < 500; ++r) {
        cur += 2 + rng.bounded(8);
        keys.push_back(cur);
        f.append_leaf(cur);
    }
    for (std::uint64_t fr : {1ull, 7ull, 250ull, 499ull, 500ull}) {
        const Leaf* finger = f.leaf_at(fr);
        for (Key k : keys) CHECK(f.fsearch(finger, k)->key == k);
        CHECK_THROWS_AS(f.fsearch(finger, 1), KeyAbsent);
        CHECK_THROWS_AS(f.fsearch(finger, cur + 1000), KeyAbsent);
        CHECK_THROWS_AS(f.fsearch(finger, keys[40] + 1), KeyAbsent);
    }
}

TEST_CASE("zero-distance searches cost no probes") {
    NestedForest f;
    for (std::uint64_t r = 1; r <= 300; ++r) f.append_leaf(r * 3);
    const Leaf* finger = f.leaf_at(137);
    const std::uint64_t before = f.instr().probe_count();
    CHECK(f.pred_leaf(finger, finger->key) == finger);
    CHECK(f.instr().probe_count() == before);
}

TEST_CASE("probe cost grows with rank distance, not size") {
    auto mean_probes = [](std::uint64_t n, std::uint64_t d, std::uint64_t seed) {
        NestedForest f;
        for (std::uint64_t r = 1; r <= n; ++r) f.append_leaf(r * 5);
        SplitMix64 rng(seed);
        std::uint64_t total = 0;
        const int q = 600;
        for (int i = 0; i < q; ++i) {
            std::uint64_t fr = 1 + rng.bounded(n - d);
            const Leaf* finger = f.leaf_at(fr);
            const std::uint64_t before = f.instr().probe_count();
            const Leaf* got = f.pred_leaf(finger, (fr + d) * 5);
            total += f.instr().probe_count() - before;
            REQUIRE(got != nullptr);
            CHECK(got->rank == fr + d);
        }
        return static_cast<double>(total) / q;
    };
    const double near = mean_probes(1 << 14, 4, 1);
    const double far = mean_probes(1 << 14, 1 << 12, 2);
    CHECK(near < far);
    // Same distance at different sizes should cost about the same.
    const double small_n = mean_probes(1 << 12, 16, 3);
    const double large_n = mean_probes(1 << 15, 16, 4);
    CHECK(large_n <= small_n * 1.5);
    CHECK(small_n <= large_n * 1.5);
}

TEST_CASE("append and removal work stay within declared budgets") {
    NestedForest f;
    SplitMix64 rng(77);
    Key cur = 0;
    std::uint64_t max_append = 0, max_remove = 0;
    const int m = 40000;
    for (int i = 0; i < m; ++i) {
        cur += 1 + rng.bounded(5);
        const std::uint64_t before = f.instr().work_count();
        f.append_leaf(cur);
        max_append = std::max(max_append, f.instr().work_count() - before);
    }
    const std::uint64_t append_total = f.instr().work_count();
    CHECK(max_append <= kForestAppendWorkBudget);
    CHECK(append_total <= kForestAppendAmortized * static_cast<std::uint64_t>(m));
    while (f.size() > 0) {
        const std::uint64_t before = f.instr().work_count();
        f.remove_tail_leaf();
        max_remove = std::max(max_remove, f.instr().work_count() - before);
    }
    CHECK(max_remove <= kForestRemoveWorkBudget);
}

TEST_CASE("space accounting tracks every cell class") {
    NestedForest f;
    const std::uint64_t n = 5000;
    for (std::uint64_t r = 1; r <= n; ++r) f.append_leaf(r * 2);
    REQUIRE(f.validate());
    SpaceReport rep = f.space();
    CHECK(rep.leaves == n);
    CHECK(rep.copy_links >= n);                  // one copy per active scale
    CHECK(rep.routing_entries >= rep.copy_links);  // every copy has a routing entry
    CHECK(rep.nodes >= 1);
    // Raw forest cells stay linear with a small constant.
    CHECK(rep.total() <= 16 * n);
}
