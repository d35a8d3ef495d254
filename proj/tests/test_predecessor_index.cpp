#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "doctest.h"
#include "fingerdict/predecessor_index.hpp"

using namespace fingerdict;

namespace {

// Linear-scan reference: largest key <= x with its 1-based position.
std::optional<PredecessorHit> scan_pred(const std::vector<Key>& keys, Key x) {
    std::optional<PredecessorHit> best;
    for (std::size_t i = 0; i < keys.size(); ++i)
        if (keys[i] <= x) best = PredecessorHit{i + 1, keys[i]};
    return best;
}

std::vector<Key> random_sorted_keys(SplitMix64& rng, std::size_t m, Key span) {
    std::vector<Key> keys;
    keys.reserve(m);
    Key cur = 0;
    for (std::size_t i = 0; i < m; ++i) {
        cur += 1 + rng.bounded(span);
        keys.push_back(cur);
    }
    return keys;
}

int pred_probe_bound(std::size_t m) {
    return 2 * static_cast<int>(std::ceil(std::log2(static_cast<double>(m) + 1))) + 2;
}

}  // namespace

TEST_CASE("small set index on a three key set") {
    auto idx = SmallSetIndex::build_static({10, 20, 30});
    CHECK(idx.predecessor(30) == PredecessorHit{3, 30});
    CHECK(idx.predecessor(999) == PredecessorHit{3, 30});
    CHECK(idx.predecessor(15) == PredecessorHit{1, 10});
    CHECK(idx.predecessor(5) == std::nullopt);
    CHECK(idx.predecessor(9) == std::nullopt);
    CHECK(idx.predecessor(10) == PredecessorHit{1, 10});
}

TEST_CASE("build rejects unsorted input") {
    CHECK_THROWS_AS(SmallSetIndex::build_static({5, 7, 7, 9}), NotSorted);
    CHECK_THROWS_AS(SmallSetIndex::build_static({7, 5}), NotSorted);
    CHECK_NOTHROW(SmallSetIndex::build_static({}));
    CHECK_NOTHROW(SmallSetIndex::build_static({42}));
}

TEST_CASE("static index agrees with a linear scan") {
    SplitMix64 rng(0xA11CE);
    for (std::size_t m : {0u, 1u, 2u, 3u, 7u, 16u, 33u, 50u}) {
        auto keys = random_sorted_keys(rng, m, 20);
        auto idx = SmallSetIndex::build_static(keys);
        for (int q = 0; q < 300; ++q) {
            Key x = rng.bounded(25 * (m + 2));
            CHECK(idx.predecessor(x) == scan_pred(keys, x));
        }
        for (Key k : keys) CHECK(idx.predecessor(k) == scan_pred(keys, k));
    }
}

TEST_CASE("static index probe bound") {
    SplitMix64 rng(0xB0B);
    for (std::size_t m : {1u, 2u, 5u, 31u, 32u, 33u, 1024u}) {
        Instrumentation instr;
        auto keys = random_sorted_keys(rng, m, 10);
        auto idx = SmallSetIndex::build_static(keys, &instr);
        for (int q = 0; q < 200; ++q) {
            std::uint64_t before = instr.probe_count();
            idx.predecessor(rng.bounded(12 * m + 5));
            auto used = static_cast<int>(instr.probe_count() - before);
            CHECK(used <= pred_probe_bound(m));
        }
    }
}

TEST_CASE("tail dynamic index matches reference under appends and queries") {
    SplitMix64 rng(0xC0FFEE);
    TailDynamicIndex idx;
    std::vector<Key> ref;
    Key cur = 0;
    for (int i = 0; i < 10000; ++i) {
        cur += 1 + rng.bounded(9);
        idx.append_tail(cur);
        ref.push_back(cur);
        if (i % 37 == 0) {
            Key x = rng.bounded(cur + 10);
            CHECK(idx.predecessor(x) == scan_pred(ref, x));
            std::size_t lt = static_cast<std::size_t>(
                std::lower_bound(ref.begin(), ref.end(), x) - ref.begin());
            CHECK(idx.rank_lt(x) == lt);
        }
    }
    CHECK(idx.size() == ref.size());
    for (int q = 0; q < 2000; ++q) {
        std::size_t i = rng.bounded(ref.size());
        CHECK(idx.at(i) == ref[i]);
    }
    CHECK(idx.back() == ref.back());
}

TEST_CASE("tail dynamic index append work is bounded per update") {
    Instrumentation instr;
    TailDynamicIndex idx(TailDynamicIndex::kDefaultStepsPerUpdate, &instr);
    SplitMix64 rng(7);
    Key cur = 0;
    std::uint64_t max_single = 0;
    const int m = 10000;
    for (int i = 0; i < m; ++i) {
        cur += 1 + rng.bounded(3);
        std::uint64_t before = instr.work_count();
        idx.append_tail(cur);
        max_single = std::max(max_single, instr.work_count() - before);
    }
    CHECK(max_single <= TailDynamicIndex::kDefaultStepsPerUpdate);
    // Every key is pushed once, copied into the base at most once, and each
    // freeze costs one unit: total work is at most 3 per append.
    CHECK(instr.work_count() <= 3ull * m);
}

TEST_CASE("tail dynamic index predecessor probes stay logarithmic plus tail scans") {
    Instrumentation instr;
    TailDynamicIndex idx(TailDynamicIndex::kDefaultStepsPerUpdate, &instr);
    SplitMix64 rng(99);
    Key cur = 0;
    for (int i = 0; i < 4096; ++i) {
        cur += 1 + rng.bounded(5);
        idx.append_tail(cur);
    }
    int bound = pred_probe_bound(idx.size()) + 2 * TailDynamicIndex::kDefaultStepsPerUpdate;
    for (int q = 0; q < 500; ++q) {
        std::uint64_t before = instr.probe_count();
        idx.predecessor(rng.bounded(cur + 10));
        CHECK(static_cast<int>(instr.probe_count() - before) <= bound);
        before = instr.probe_count();
        idx.rank_lt(rng.bounded(cur + 10));
        CHECK(static_cast<int>(instr.probe_count() - before) <= bound);
    }
}

TEST_CASE("tail dynamic index supports tail removal") {
    SplitMix64 rng(0xDEAD);
    TailDynamicIndex idx;
    std::vector<Key> ref;
    Key cur = 0;
    for (int step = 0; step < 20000; ++step) {
        bool grow = ref.empty() || rng.bounded(10) < 6;
        if (grow) {
            cur = (ref.empty() ? 0 : ref.back()) + 1 + rng.bounded(4);
            idx.append_tail(cur);
            ref.push_back(cur);
        } else {
            idx.remove_tail();
            ref.pop_back();
        }
        if (step % 53 == 0) {
            CHECK(idx.size() == ref.size());
            if (!ref.empty()) {
                CHECK(idx.back() == ref.back());
                std::size_t i = rng.bounded(ref.size());
                CHECK(idx.at(i) == ref[i]);
                Key x = rng.bounded(ref.back() + 5);
                CHECK(idx.predecessor(x) == scan_pred(ref, x));
            }
        }
    }
}

TEST_CASE("tail dynamic index rejects bad mutations") {
    TailDynamicIndex idx;
    CHECK_THROWS_AS(idx.remove_tail(), EmptyStructure);
    idx.append_tail(50);
    CHECK_THROWS_AS(idx.append_tail(50), KeyNotGreaterThanMax);
    CHECK_THROWS_AS(idx.append_tail(10), KeyNotGreaterThanMax);
    idx.append_tail(51);
    idx.remove_tail();
    idx.remove_tail();
    CHECK_THROWS_AS(idx.remove_tail(), EmptyStructure);
}
