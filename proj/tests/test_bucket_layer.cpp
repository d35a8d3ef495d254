#include <algorithm>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "fingerdict/bucket_layer.hpp"
#include "fingerdict/budgets.hpp"
#include "fingerdict/common.hpp"
#include "fingerdict/oracle.hpp"
#include "fingerdict/schedule.hpp"

using namespace fingerdict;

namespace {

// Reference answer: rank of the largest key <= s in a sorted vector.
std::uint64_t scan_pred(const std::vector<Key>& keys, Key s) {
    std::uint64_t r = 0;
    while (r < keys.size() && keys[r] <= s) ++r;
    return r;
}

std::vector<Key> iota_keys(std::uint64_t n, Key stride = 10, Key base = 5) {
    std::vector<Key> v(n);
    for (std::uint64_t i = 0; i < n; ++i) v[i] = base + stride * i;
    return v;
}

}  // namespace

TEST_CASE("tail dict: exhaustive small sizes against a scanning oracle") {
    for (std::uint64_t n : {1ull, 2ull, 3ull, 4ull, 5ull, 7ull, 8ull, 9ull,
                            15ull, 16ull, 17ull, 31ull, 33ull, 64ull}) {
        const std::vector<Key> keys = iota_keys(n);
        TailFingerDict dict;
        for (Key k : keys) dict.insert_tail(k);
        REQUIRE(dict.validate());
        REQUIRE(dict.size() == n);
        for (std::uint64_t f = 1; f <= n; ++f) {
            for (Key s = 0; s <= keys.back() + 12; ++s) {
                INFO("n=", n, " f=", f, " s=", s);
                REQUIRE(dict.search_star(f, s) == scan_pred(keys, s));
            }
        }
    }
}

TEST_CASE("tail dict: rank handles address elements directly") {
    TailFingerDict dict;
    std::vector<std::uint64_t> handles;
    for (Key k : iota_keys(100, 7, 3)) handles.push_back(dict.insert_tail(k));
    for (std::uint64_t i = 0; i < handles.size(); ++i) {
        REQUIRE(handles[i] == i + 1);
        REQUIRE(dict.at(handles[i]) == 3 + 7 * i);
    }
    // Handles survive further growth untouched.
    dict.insert_tail(100000);
    REQUIRE(dict.at(handles[41]) == 3 + 7 * 41);
    // A removed rank becomes stale.
    dict.delete_tail();
    dict.delete_tail();
    REQUIRE(dict.size() == 99);
    REQUIRE_THROWS_AS(dict.search_star(100, 50), StaleFinger);
    REQUIRE_THROWS_AS(dict.search_star(0, 50), StaleFinger);
    REQUIRE(dict.search_star(99, 3 + 7 * 98) == 99);
}

TEST_CASE("tail dict: update errors") {
    TailFingerDict dict;
    REQUIRE_THROWS_AS(dict.delete_tail(), EmptyStructure);
    dict.insert_tail(50);
    REQUIRE_THROWS_AS(dict.insert_tail(50), KeyNotGreaterThanMax);
    REQUIRE_THROWS_AS(dict.insert_tail(49), KeyNotGreaterThanMax);
    dict.insert_tail(51);
    dict.delete_tail();
    dict.delete_tail();
    REQUIRE(dict.size() == 0);
    REQUIRE_THROWS_AS(dict.delete_tail(), EmptyStructure);
}

TEST_CASE("tail dict: youngest bucket may be unrepresented yet stays searchable") {
    TailFingerDict dict;
    const std::uint32_t cap = dict.capacity();
    std::vector<Key> keys = iota_keys(cap, 10, 10);
    for (Key k : keys) dict.insert_tail(k);
    // Opening insert: the new bucket's representative job is still unpaid.
    keys.push_back(10 * (cap + 1));
    dict.insert_tail(keys.back());
    REQUIRE(dict.validate());
    REQUIRE(dict.forest().size() == 1);  // only the first bucket is represented

    // Equal to the pending representative: served by the direct tail scan.
    // Entry checks (3) plus a one-element bucket scan; a forest descent
    // could not fit in this bound.
    const std::uint64_t probes_before = dict.instr().probe_count();
    REQUIRE(dict.search_star(1, keys.back()) == cap + 1);
    const std::uint64_t spent = dict.instr().probe_count() - probes_before;
    REQUIRE(spent >= 1);
    REQUIRE(spent <= 4);

    // Just below it: must land on the elder bucket's last key.
    REQUIRE(dict.search_star(cap + 1, keys.back() - 1) == cap);
    // Below the global minimum: no predecessor.
    REQUIRE(dict.search_star(cap + 1, 9) == 0);
}

TEST_CASE("tail dict: same-bucket searches cost a size-independent constant") {
    for (std::uint64_t n : {64ull, 4096ull, 262144ull}) {
        TailFingerDict dict;
        for (Key k : iota_keys(n, 10, 10)) dict.insert_tail(k);
        const std::uint32_t cap = dict.capacity();
        // Finger and target share a bucket: two entry probes plus a scan of
        // at most capacity keys, regardless of n.
        const std::uint64_t bound = 2 + cap;
        for (std::uint64_t f : {std::uint64_t(1), std::uint64_t(cap), n / 2}) {
            const std::uint64_t b = (f - 1) / cap;
            const std::uint64_t target = b * cap + 1 + (f % cap);  // same bucket as f
            const std::uint64_t before = dict.instr().probe_count();
            REQUIRE(dict.search_star(f, 10 * target) == target);
            INFO("n=", n, " f=", f);
            REQUIRE(dict.instr().probe_count() - before <= bound);
        }
    }
}

TEST_CASE("tail dict: doubling without a capacity change slides the window") {
    TailFingerDict dict;
    for (Key k : iota_keys(16, 3, 1)) dict.insert_tail(k);
    REQUIRE(dict.capacity() == bucket_capacity(16));
    REQUIRE_FALSE(dict.rebuild_running());
    // 16 -> 40 more than doubles the size, but the capacity schedule still
    // says 4, so no rebuild may start; the window just slides.
    for (Key k : iota_keys(24, 3, 1 + 3 * 16)) dict.insert_tail(k);
    REQUIRE(dict.size() == 40);
    REQUIRE(bucket_capacity(40) == bucket_capacity(16));
    REQUIRE_FALSE(dict.rebuild_running());
    REQUIRE(dict.capacity() == bucket_capacity(40));
    REQUIRE(dict.validate());
}

TEST_CASE("tail dict: randomized churn against the oracle") {
    SplitMix64 rng(0x5eedbeefcafe01ULL);
    Instrumentation master;
    TailFingerDict dict(&master);
    std::vector<Key> mirror;
    Key next = 1;
    for (int step = 0; step < 30000; ++step) {
        const bool grow = mirror.empty() || rng.bounded(100) < 60;
        if (grow) {
            next += 1 + rng.bounded(50);
            dict.insert_tail(next);
            mirror.push_back(next);
        } else {
            dict.delete_tail();
            mirror.pop_back();
        }
        if (!mirror.empty() && step % 7 == 0) {
            const std::uint64_t f = 1 + rng.bounded(mirror.size());
            Key s;
            switch (rng.bounded(4)) {
                case 0: s = rng.bounded(next + 100); break;
                case 1: s = mirror[rng.bounded(mirror.size())]; break;
                case 2: s = mirror[rng.bounded(mirror.size())] + 1; break;
                default: s = mirror[rng.bounded(mirror.size())] - 1; break;
            }
            INFO("step=", step, " f=", f, " s=", s);
            REQUIRE(dict.search_star(f, s) == scan_pred(mirror, s));
        }
        if (step % 3000 == 0) REQUIRE(dict.validate());
    }
    REQUIRE(dict.validate());
}

TEST_CASE("tail dict: capacity rebuild runs behind the scenes and converges") {
    Instrumentation master;
    TailFingerDict dict(&master);
    std::uint64_t max_update_work = 0;
    std::uint64_t total_insert_work = 0;
    bool saw_rebuild = false;
    const std::uint64_t top = 200000;
    for (std::uint64_t i = 1; i <= top; ++i) {
        const std::uint64_t w0 = master.work_count();
        dict.insert_tail(i * 2);
        const std::uint64_t dw = master.work_count() - w0;
        max_update_work = std::max(max_update_work, dw);
        total_insert_work += dw;
        saw_rebuild = saw_rebuild || dict.rebuild_running();
    }
    REQUIRE(saw_rebuild);
    REQUIRE_FALSE(dict.rebuild_running());           // converged well before 200k
    REQUIRE(dict.capacity() == bucket_capacity(top));  // now on the larger capacity
    REQUIRE(dict.validate());
    REQUIRE(max_update_work <= kTailUpdateWorkBudget);
    REQUIRE(total_insert_work <= kTailInsertAmortized * top);

    // Searches stay exact on the rebuilt structure.
    SplitMix64 rng(0xfeed5eed77ULL);
    for (int q = 0; q < 4000; ++q) {
        const std::uint64_t f = 1 + rng.bounded(dict.size());
        const Key s = rng.bounded(2 * top + 10);
        const std::uint64_t expect = std::min<std::uint64_t>(s / 2, top);
        INFO("f=", f, " s=", s);
        REQUIRE(dict.search_star(f, s) == expect);
    }

    // Shrink far enough to trigger the downward rebuild as well.
    saw_rebuild = false;
    while (dict.size() > 30000) {
        const std::uint64_t w0 = master.work_count();
        dict.delete_tail();
        max_update_work = std::max(max_update_work, master.work_count() - w0);
        saw_rebuild = saw_rebuild || dict.rebuild_running();
    }
    REQUIRE(saw_rebuild);
    REQUIRE_FALSE(dict.rebuild_running());
    REQUIRE(dict.capacity() == bucket_capacity(dict.size()));
    REQUIRE(dict.validate());
    REQUIRE(max_update_work <= kTailUpdateWorkBudget);
    REQUIRE(dict.search_star(777, 2 * 29999) == 29999);
}

TEST_CASE("tail dict: probes grow with rank distance, not with size") {
    Instrumentation master;
    TailFingerDict dict(&master);
    const std::uint64_t n = 1 << 16;
    for (std::uint64_t i = 1; i <= n; ++i) dict.insert_tail(i * 10);
    auto mean_probes = [&](std::uint64_t d, std::uint64_t samples) {
        SplitMix64 rng(0xabcdef1234ULL + d);
        std::uint64_t sum = 0;
        for (std::uint64_t q = 0; q < samples; ++q) {
            const std::uint64_t f = 1 + rng.bounded(n - d);
            const std::uint64_t target = f + d;
            const std::uint64_t p0 = master.probe_count();
            REQUIRE(dict.search_star(f, target * 10) == target);
            sum += master.probe_count() - p0;
        }
        return double(sum) / double(samples);
    };
    const double near = mean_probes(4, 2000);
    const double far = mean_probes(1ull << 14, 2000);
    INFO("near=", near, " far=", far);
    REQUIRE(near < far);
}

TEST_CASE("tail dict: counted cells stay within the declared linear bound") {
    for (std::uint64_t n : {500ull, 5000ull, 50000ull}) {
        TailFingerDict dict;
        for (std::uint64_t i = 1; i <= n; ++i) dict.insert_tail(i * 3);
        INFO("n=", n, " cells=", dict.counted_cells());
        REQUIRE(dict.counted_cells() <= kTailSpaceCellsPerKey * n);
    }
}
