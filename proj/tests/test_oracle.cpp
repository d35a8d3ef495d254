#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "fingerdict/oracle.hpp"

using namespace fingerdict;

TEST_CASE("oracle fixed example") {
    std::vector<Key> keys(100);
    std::iota(keys.begin(), keys.end(), 1);
    auto d = OracleDict::bulk_load(keys);
    CHECK(d.finger_search(10, 37) == OracleHit{37, 27});
    CHECK(d.finger_search(10, 10) == OracleHit{10, 0});
    CHECK(d.finger_search(100, 1) == OracleHit{1, 99});
    CHECK(d.finger_search(50, 1000) == OracleHit{100, 50});
    CHECK(d.finger_search(50, 0) == OracleHit{0, 50});
}

TEST_CASE("oracle rejects bad input") {
    CHECK_THROWS_AS(OracleDict::bulk_load({3, 3}), NotSorted);
    CHECK_THROWS_AS(OracleDict::bulk_load({5, 4}), NotSorted);
    OracleDict d;
    CHECK_THROWS_AS(d.finger_search(1, 5), EmptyStructure);
    d.insert(7);
    CHECK_THROWS_AS(d.insert(7), DuplicateKey);
    CHECK_THROWS_AS(d.erase(8), KeyAbsent);
    d.erase(7);
    CHECK(d.size() == 0);
}

TEST_CASE("oracle inserts report ordered positions") {
    OracleDict d;
    CHECK(d.insert(50) == 1);
    CHECK(d.insert(10) == 1);
    CHECK(d.insert(70) == 3);
    CHECK(d.insert(60) == 3);
    CHECK(d.at(1) == 10);
    CHECK(d.at(4) == 70);
}

TEST_CASE("oracle agrees with a scan under random churn") {
    SplitMix64 rng(0xFACADE);
    OracleDict d;
    std::vector<Key> ref;
    for (int step = 0; step < 8000; ++step) {
        const Key k = rng.bounded(4000);
        const bool present = std::binary_search(ref.begin(), ref.end(), k);
        if (!present && (ref.empty() || rng.bounded(10) < 7)) {
            d.insert(k);
            ref.insert(std::lower_bound(ref.begin(), ref.end(), k), k);
        } else if (present) {
            d.erase(k);
            ref.erase(std::lower_bound(ref.begin(), ref.end(), k));
        }
        if (!ref.empty() && step % 7 == 0) {
            const std::uint64_t f = 1 + rng.bounded(ref.size());
            const Key s = rng.bounded(4200);
            const OracleHit got = d.finger_search(f, s);
            auto it = std::upper_bound(ref.begin(), ref.end(), s);
            const std::uint64_t want = static_cast<std::uint64_t>(it - ref.begin());
            CHECK(got.position == want);
            const std::uint64_t dd = want >= f ? want - f : f - want;
            CHECK(got.distance == dd);
        }
    }
}

TEST_CASE("oracle probe bound") {
    std::vector<Key> keys(1 << 12);
    for (std::size_t i = 0; i < keys.size(); ++i) keys[i] = (i + 1) * 3;
    Instrumentation instr;
    auto d = OracleDict::bulk_load(keys, &instr);
    SplitMix64 rng(31);
    for (int q = 0; q < 5000; ++q) {
        const std::uint64_t f = 1 + rng.bounded(keys.size());
        const Key s = rng.bounded(keys.back() + 10);
        const std::uint64_t before = instr.probe_count();
        const OracleHit hit = d.finger_search(f, s);
        const auto used = static_cast<double>(instr.probe_count() - before);
        const double bound = 2.0 * std::ceil(std::log2(static_cast<double>(hit.distance) + 1.0)) + 4.0;
        CHECK(used <= bound);
    }
    const std::uint64_t before = instr.probe_count();
    d.finger_search(17, keys[16]);
    CHECK(instr.probe_count() - before <= 2);
}
