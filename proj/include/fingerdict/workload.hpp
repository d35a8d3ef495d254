#ifndef FINGERDICT_WORKLOAD_HPP
#define FINGERDICT_WORKLOAD_HPP

// Workload generation and differential replay.
//
// A WorkloadSpec describes a seeded stream of dictionary operations: an
// initial key population, an insert/delete/search mix, and a rank-distance
// distribution for the search finger/target pairs.  generate_workload turns
// the spec into a concrete op list, deterministically under the seed, and
// run_workload replays that list against the chosen structure with the flat
// reference dictionary in lockstep: every search answer is cross-checked,
// timed, and probe-counted, producing one report row per search.  A mismatch
// aborts with the failing op index and the seed, which together name the
// minimal failing prefix for reproduction.
//
// The same op list can be loaded from a replay file, one op per line:
//   A <key>               append above the current maximum
//   I <finger-key> <key>  insert next to a present finger key
//   D <key>               delete a present key
//   S <finger-key> <key>  search for the predecessor of <key> from <finger-key>
// Blank lines and lines starting with '#' are ignored.

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "fingerdict/common.hpp"

namespace fingerdict {

enum class StructureKind { kNestedBdt, kRandomized, kOracle };

const char* structure_name(StructureKind kind);
StructureKind structure_from_name(std::string_view name);  // throws InvalidSpec

enum class DistKind { kUniform, kGeometric, kFixed };

struct DistanceDist {
    DistKind kind = DistKind::kUniform;
    double p = 0.5;        // geometric success probability, in (0, 1)
    std::uint64_t d = 1;   // fixed rank distance

    // "uniform" | "geometric:<p>" | "fixed:<d>" (parentheses work too).
    static DistanceDist parse(std::string_view text);  // throws InvalidSpec
    bool operator==(const DistanceDist&) const = default;
};

struct WorkloadSpec {
    StructureKind structure = StructureKind::kOracle;
    std::uint64_t n = 0;    // keys preloaded before the measured ops
    std::uint64_t ops = 0;  // measured operation count
    double mix_insert = 0.0;
    double mix_delete = 0.0;
    double mix_search = 1.0;
    DistanceDist dist;
    std::uint64_t seed = 0;

    void validate() const;  // throws InvalidSpec
};

struct Op {
    char kind = 'S';  // 'A' append, 'I' finger insert, 'D' delete, 'S' search
    Key finger = 0;   // finger key ('I'/'S' only)
    Key key = 0;      // subject key, or the search target for 'S'
    bool operator==(const Op&) const = default;
};

struct Workload {
    std::vector<Key> initial;  // strictly increasing preload
    std::vector<Op> ops;
    bool operator==(const Workload&) const = default;
};

// Deterministic under spec.seed.  Every op is valid against a faithful replay
// from `initial`, and every search pair sits at a rank distance drawn from
// spec.dist (exact for fixed(d) whenever the dictionary holds more than d
// keys).  For the tail structure, inserts become appends and deletes remove
// the current maximum.
Workload generate_workload(const WorkloadSpec& spec);

struct ProbeRow {
    std::string structure;
    std::uint64_t n = 0;           // live size when the search ran
    std::uint64_t d = 0;           // rank distance, computed by the reference
    std::uint64_t probes = 0;      // structure comparisons for this search
    std::uint64_t wall_nanos = 0;  // wall-clock time of the structure call
    std::string op_kind;
};

struct ProbeReport {
    std::vector<ProbeRow> rows;
};

// Test hook: rewrites the structure's answer (the predecessor key, 0 when the
// structure found none) before the lockstep comparison.
using FaultHook = std::function<Key(std::uint64_t op_index, Key answer)>;

struct RunOptions {
    FaultHook fault;                    // empty: answers pass through untouched
    std::uint64_t validate_every = 0;   // 0: skip periodic self-checks
    bool validate_final = false;
};

// Replays `w` on spec.structure with the reference dictionary in lockstep.
// Malformed ops throw InvalidSpec; answer or size mismatches (and failed
// self-checks) throw DivergenceDetected carrying the op index and spec.seed.
ProbeReport run_workload(const WorkloadSpec& spec, const Workload& w,
                         const RunOptions& opts = {});

// generate_workload + run_workload.
ProbeReport run_spec(const WorkloadSpec& spec, const RunOptions& opts = {});

// CSV serialization: header exactly `structure,n,d,probes,wall_nanos,op_kind`,
// LF line endings, decimal integers.  An empty report yields a header-only
// file.  emit_csv throws IoFailure when the path cannot be written.
std::string csv_string(const ProbeReport& report);
void emit_csv(const ProbeReport& report, const std::string& path);

// Replay-file parsing.  Errors carry the 1-based line number.
std::vector<Op> parse_ops_text(const std::string& text);     // throws InvalidSpec
std::vector<Op> load_ops_file(const std::string& path);      // + IoFailure

}  // namespace fingerdict

#endif
