#ifndef FINGERDICT_COMMON_HPP
#define FINGERDICT_COMMON_HPP

// Shared plumbing for the fingerdict structures: key type, typed errors,
// probe/work instrumentation, and a small deterministic RNG.
//
// Probe accounting convention: a "probe" is one counted unit of search work
// (a key comparison or a routing-index query step).  "Work" counts structural
// mutation effort (node creations, routing writes, copy steps, rebuild
// slices).  Both are kept per top-level structure; counters are relaxed
// atomics so concurrent read-only searches may share one instance.

#include <atomic>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace fingerdict {

using Key = std::uint64_t;

// ---------------------------------------------------------------------------
// Errors.  Names are part of the library contract; tests match on the type.

struct DictError : std::runtime_error {
    explicit DictError(const std::string& msg) : std::runtime_error(msg) {}
};

struct KeyNotGreaterThanMax : DictError {
    explicit KeyNotGreaterThanMax(const std::string& msg = "KeyNotGreaterThanMax: tail key must exceed current maximum")
        : DictError(msg) {}
};
struct EmptyStructure : DictError {
    explicit EmptyStructure(const std::string& msg = "EmptyStructure: nothing to remove") : DictError(msg) {}
};
struct TargetBeyondArray : DictError {
    explicit TargetBeyondArray(const std::string& msg = "TargetBeyondArray: target exceeds last routed key")
        : DictError(msg) {}
};
struct KeyAbsent : DictError {
    explicit KeyAbsent(const std::string& msg = "KeyAbsent: key is not stored") : DictError(msg) {}
};
struct NotSorted : DictError {
    explicit NotSorted(const std::string& msg = "NotSorted: input keys must be strictly increasing") : DictError(msg) {}
};
struct DuplicateKey : DictError {
    explicit DuplicateKey(const std::string& msg = "DuplicateKey: key is already stored") : DictError(msg) {}
};
struct KeyOutOfFingerRange : DictError {
    explicit KeyOutOfFingerRange(const std::string& msg = "KeyOutOfFingerRange: key does not fit between finger and successor")
        : DictError(msg) {}
};
struct StaleFinger : DictError {
    explicit StaleFinger(const std::string& msg = "StaleFinger: finger refers to a deleted element") : DictError(msg) {}
};
struct BudgetMismatch : DictError {
    explicit BudgetMismatch(const std::string& msg = "BudgetMismatch: increaser move does not sum to c") : DictError(msg) {}
};
struct InvalidSpec : DictError {
    explicit InvalidSpec(const std::string& msg = "InvalidSpec: workload specification is malformed") : DictError(msg) {}
};
struct DivergenceDetected : DictError {
    std::size_t op_index;
    std::uint64_t seed;
    DivergenceDetected(const std::string& msg, std::size_t op, std::uint64_t sd)
        : DictError(msg), op_index(op), seed(sd) {}
};
struct IoFailure : DictError {
    explicit IoFailure(const std::string& msg = "IoFailure: could not write output") : DictError(msg) {}
};

// Internal invariant check that stays on in release builds; a trip means a
// bug in this library, not bad caller input.
inline void fd_require(bool cond, const char* what) {
    if (!cond) throw std::logic_error(std::string("fingerdict internal invariant violated: ") + what);
}

// ---------------------------------------------------------------------------
// Instrumentation.

struct Instrumentation {
    std::atomic<std::uint64_t> probes{0};
    std::atomic<std::uint64_t> work{0};

    Instrumentation() = default;
    Instrumentation(const Instrumentation& o)
        : probes(o.probe_count()), work(o.work_count()) {}
    Instrumentation& operator=(const Instrumentation& o) {
        probes.store(o.probe_count(), std::memory_order_relaxed);
        work.store(o.work_count(), std::memory_order_relaxed);
        return *this;
    }

    void probe(std::uint64_t k = 1) { probes.fetch_add(k, std::memory_order_relaxed); }
    void add_work(std::uint64_t k = 1) { work.fetch_add(k, std::memory_order_relaxed); }
    std::uint64_t probe_count() const { return probes.load(std::memory_order_relaxed); }
    std::uint64_t work_count() const { return work.load(std::memory_order_relaxed); }
    void reset() { probes.store(0); work.store(0); }
};

// ---------------------------------------------------------------------------
// Deterministic RNG.  splitmix64: 64-bit state, identical streams on every
// platform (std::uniform_int_distribution is implementation-defined, so all
// bounded draws go through bounded()).

class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform draw in [0, n).  Multiply-shift; bias is < n / 2^64.
    std::uint64_t bounded(std::uint64_t n) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    // Uniform double in [0, 1).
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  private:
    std::uint64_t state_;
};

inline int floor_log2_u64(std::uint64_t x) {
    fd_require(x != 0, "floor_log2 of zero");
    return 63 - __builtin_clzll(x);
}

}  // namespace fingerdict

#endif
