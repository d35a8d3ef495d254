#include "fingerdict/workload.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <unordered_map>

#include "fingerdict/bucket_layer.hpp"
#include "fingerdict/oracle.hpp"
#include "fingerdict/randomized_dict.hpp"

namespace fingerdict {

namespace {

// Preload keys are spread this far apart so generated inserts always find a
// gap to land in.
constexpr std::uint64_t kKeyStride = 1ull << 32;

std::uint64_t parse_u64(std::string_view text, const char* what) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v, 10);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw InvalidSpec(std::string("not a decimal integer for ") + what + ": '" +
                          std::string(text) + "'");
    }
    return v;
}

double parse_double(std::string_view text, const char* what) {
    // from_chars<double> is missing on some libstdc++ versions; strtod via a
    // bounded copy keeps this dependency-free.
    std::string buf(text);
    char* end = nullptr;
    double v = std::strtod(buf.c_str(), &end);
    if (end != buf.c_str() + buf.size() || buf.empty()) {
        throw InvalidSpec(std::string("not a number for ") + what + ": '" + buf + "'");
    }
    return v;
}

}  // namespace

const char* structure_name(StructureKind kind) {
    switch (kind) {
        case StructureKind::kNestedBdt: return "nested-bdt";
        case StructureKind::kRandomized: return "randomized";
        case StructureKind::kOracle: return "oracle";
    }
    throw InvalidSpec("unknown structure kind");
}

StructureKind structure_from_name(std::string_view name) {
    if (name == "nested-bdt") return StructureKind::kNestedBdt;
    if (name == "randomized") return StructureKind::kRandomized;
    if (name == "oracle") return StructureKind::kOracle;
    throw InvalidSpec("unknown structure '" + std::string(name) +
                      "' (expected nested-bdt, randomized, or oracle)");
}

DistanceDist DistanceDist::parse(std::string_view text) {
    DistanceDist out;
    if (text == "uniform") {
        out.kind = DistKind::kUniform;
        return out;
    }
    // Accept name:arg and name(arg).
    std::string_view name = text;
    std::string_view arg;
    auto colon = text.find(':');
    auto paren = text.find('(');
    if (colon != std::string_view::npos) {
        name = text.substr(0, colon);
        arg = text.substr(colon + 1);
    } else if (paren != std::string_view::npos && text.back() == ')') {
        name = text.substr(0, paren);
        arg = text.substr(paren + 1, text.size() - paren - 2);
    }
    if (name == "geometric") {
        out.kind = DistKind::kGeometric;
        out.p = arg.empty() ? 0.5 : parse_double(arg, "geometric p");
        if (!(out.p > 0.0) || !(out.p < 1.0)) {
            throw InvalidSpec("geometric p must lie strictly inside (0, 1)");
        }
        return out;
    }
    if (name == "fixed") {
        if (arg.empty()) throw InvalidSpec("fixed distance needs a value, e.g. fixed:16");
        out.kind = DistKind::kFixed;
        out.d = parse_u64(arg, "fixed distance");
        return out;
    }
    throw InvalidSpec("unknown distance distribution '" + std::string(text) +
                      "' (expected uniform, geometric:<p>, or fixed:<d>)");
}

void WorkloadSpec::validate() const {
    if (mix_insert < 0.0 || mix_delete < 0.0 || mix_search < 0.0) {
        throw InvalidSpec("op mix proportions must be nonnegative");
    }
    double sum = mix_insert + mix_delete + mix_search;
    if (std::abs(sum - 1.0) > 1e-9) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "op mix proportions must sum to 1 (got %.6f)", sum);
        throw InvalidSpec(buf);
    }
    if (dist.kind == DistKind::kGeometric && (!(dist.p > 0.0) || !(dist.p < 1.0))) {
        throw InvalidSpec("geometric p must lie strictly inside (0, 1)");
    }
}

// ---------------------------------------------------------------------------
// Generation

namespace {

// Draws a rank distance for a dictionary of `size` keys (size >= 1).
std::uint64_t draw_distance(const DistanceDist& dist, std::uint64_t size, SplitMix64& rng) {
    std::uint64_t cap = size - 1;  // largest reachable rank distance
    switch (dist.kind) {
        case DistKind::kUniform:
            return rng.bounded(cap + 1);
        case DistKind::kGeometric: {
            double u = rng.unit();
            if (u <= 0.0) u = 1e-18;
            auto d = static_cast<std::uint64_t>(std::log(u) / std::log1p(-dist.p));
            return std::min(d, cap);
        }
        case DistKind::kFixed:
            return std::min(dist.d, cap);
    }
    return 0;
}

}  // namespace

Workload generate_workload(const WorkloadSpec& spec) {
    spec.validate();
    Workload w;
    w.initial.reserve(spec.n);
    for (std::uint64_t i = 1; i <= spec.n; ++i) w.initial.push_back(i * kKeyStride);

    // The mirror replays the ops as they are generated, so rank bookkeeping
    // and distance checks run against exactly the state a consumer will see.
    OracleDict mirror = OracleDict::bulk_load(w.initial);
    SplitMix64 rng(spec.seed);
    const bool tail_only = spec.structure == StructureKind::kNestedBdt;

    w.ops.reserve(spec.ops);
    for (std::uint64_t i = 0; i < spec.ops; ++i) {
        double u = rng.unit();
        char kind = u < spec.mix_insert                   ? 'I'
                    : u < spec.mix_insert + spec.mix_delete ? 'D'
                                                            : 'S';
        if (mirror.size() == 0) kind = 'I';  // nothing to delete or search yet

        if (kind == 'I') {
            if (tail_only || mirror.size() == 0) {
                Key base = mirror.size() ? mirror.at(mirror.size()) : 0;
                Key k = base + 1 + rng.bounded(kKeyStride);
                mirror.insert(k);
                w.ops.push_back(Op{'A', 0, k});
                continue;
            }
            // Pick a random predecessor-to-be and split its gap.  The stride
            // keeps gaps astronomically wide, but retry on the off chance.
            Op op{'I', 0, 0};
            for (int attempt = 0; attempt < 64; ++attempt) {
                std::uint64_t r = 1 + rng.bounded(mirror.size());
                Key left = mirror.at(r);
                Key right = r < mirror.size() ? mirror.at(r + 1) : left + kKeyStride;
                if (right - left < 2) continue;
                op.finger = left;
                op.key = left + 1 + rng.bounded(right - left - 1);
                break;
            }
            fd_require(op.key != 0, "workload generator found no insertable gap");
            mirror.insert(op.key);
            w.ops.push_back(op);
        } else if (kind == 'D') {
            std::uint64_t r = tail_only ? mirror.size() : 1 + rng.bounded(mirror.size());
            Key victim = mirror.at(r);
            mirror.erase(victim);
            w.ops.push_back(Op{'D', 0, victim});
        } else {
            // Draw the distance first, then a finger rank for which a target
            // at exactly that distance exists, so fixed(d) stays exact.
            std::uint64_t size = mirror.size();
            std::uint64_t d = draw_distance(spec.dist, size, rng);
            bool leftward = rng.next() & 1;
            // Valid finger ranks: leftward needs f - d >= 1, rightward needs
            // f + d <= size; both ranges have size - d entries.
            std::uint64_t f = 1 + rng.bounded(size - d) + (leftward ? d : 0);
            std::uint64_t t = leftward ? f - d : f + d;
            Key target_key = mirror.at(t);
            Key next = t < size ? mirror.at(t + 1) : target_key + kKeyStride;
            // Any s in [key(t), key(t+1)) has predecessor t.
            Key s = target_key + rng.bounded(std::min<std::uint64_t>(next - target_key, 1u << 16));
            OracleHit check = mirror.finger_search(f, s);
            fd_require(check.position == t && check.distance == d,
                       "workload generator produced an off-distance search pair");
            w.ops.push_back(Op{'S', mirror.at(f), s});
        }
    }
    return w;
}

// ---------------------------------------------------------------------------
// Replay

namespace {

// One structure behind a uniform predecessor-key interface, with the flat
// reference dictionary alongside for validation and distance measurement.
class Runner {
  public:
    Runner(const WorkloadSpec& spec, const std::vector<Key>& initial) : spec_(spec) {
        switch (spec.structure) {
            case StructureKind::kNestedBdt:
                tail_ = std::make_unique<TailFingerDict>();
                for (Key k : initial) tail_->insert_tail(k);
                break;
            case StructureKind::kRandomized: {
                rand_ = std::make_unique<RandomizedFingerDict>(spec.seed);
                std::uint64_t h = 0;
                for (Key k : initial) {
                    h = h ? rand_->insert_at(h, k) : rand_->insert_first(k);
                    handles_[k] = h;
                }
                break;
            }
            case StructureKind::kOracle:
                subject_ = std::make_unique<OracleDict>(OracleDict::bulk_load(initial));
                break;
        }
        ref_ = OracleDict::bulk_load(initial);
    }

    void run(const std::vector<Op>& ops, const RunOptions& opts, ProbeReport& report) {
        for (std::uint64_t i = 0; i < ops.size(); ++i) {
            step(i, ops[i], opts, report);
            if (opts.validate_every && (i + 1) % opts.validate_every == 0) self_check(i);
        }
        if (opts.validate_final && !ops.empty()) self_check(ops.size() - 1);
    }

  private:
    [[noreturn]] void diverge(std::uint64_t i, const std::string& what) {
        std::ostringstream os;
        os << "lockstep divergence at op " << i << " (seed " << spec_.seed << "): " << what
           << "; the first " << (i + 1) << " ops of this workload reproduce it";
        throw DivergenceDetected(os.str(), i, spec_.seed);
    }

    void self_check(std::uint64_t i) {
        bool ok = true;
        if (tail_) ok = tail_->validate();
        if (rand_) ok = rand_->validate();
        if (subject_) ok = std::is_sorted(subject_->keys().begin(), subject_->keys().end());
        if (!ok) diverge(i, "structure self-check failed");
    }

    // 1-based rank of a key known to be present in the reference.
    std::uint64_t ref_rank(Key k) const {
        const auto& ks = ref_.keys();
        auto it = std::lower_bound(ks.begin(), ks.end(), k);
        return static_cast<std::uint64_t>(it - ks.begin()) + 1;
    }

    void require(bool cond, std::uint64_t i, const std::string& what) const {
        if (!cond) {
            std::ostringstream os;
            os << "op " << i << " is invalid: " << what;
            throw InvalidSpec(os.str());
        }
    }

    void step(std::uint64_t i, const Op& op, const RunOptions& opts, ProbeReport& report) {
        switch (op.kind) {
            case 'A': do_append(i, op); break;
            case 'I': do_insert(i, op); break;
            case 'D': do_delete(i, op); break;
            case 'S': do_search(i, op, opts, report); break;
            default: require(false, i, std::string("unknown op kind '") + op.kind + "'");
        }
        std::uint64_t got = tail_   ? tail_->size()
                            : rand_ ? rand_->size()
                                    : subject_->size();
        if (got != ref_.size()) {
            std::ostringstream os;
            os << "size mismatch: structure holds " << got << ", reference holds "
               << ref_.size();
            diverge(i, os.str());
        }
    }

    void do_append(std::uint64_t i, const Op& op) {
        require(ref_.size() == 0 || op.key > ref_.at(ref_.size()), i,
                "append key must exceed the current maximum");
        if (tail_) {
            tail_->insert_tail(op.key);
        } else if (rand_) {
            std::uint64_t h = ref_.size() == 0 ? rand_->insert_first(op.key)
                                               : rand_->insert_at(handles_.at(ref_.at(ref_.size())),
                                                                  op.key);
            handles_[op.key] = h;
        } else {
            subject_->insert(op.key);
        }
        ref_.insert(op.key);
    }

    void do_insert(std::uint64_t i, const Op& op) {
        require(!tail_, i, "the tail structure only supports appends (A), not finger inserts");
        std::uint64_t size = ref_.size();
        require(size > 0, i, "finger insert into an empty dictionary");
        std::uint64_t f = ref_rank(op.finger);
        require(f <= size && ref_.at(f) == op.finger, i, "finger key is not present");
        require(op.key > op.finger, i, "inserted key must exceed its finger");
        require(f == size || op.key < ref_.at(f + 1), i,
                "inserted key must precede the finger's successor");
        if (rand_) {
            handles_[op.key] = rand_->insert_at(handles_.at(op.finger), op.key);
        } else {
            std::uint64_t pos = subject_->insert(op.key);
            if (pos != f + 1) diverge(i, "insert landed at the wrong rank");
        }
        ref_.insert(op.key);
    }

    void do_delete(std::uint64_t i, const Op& op) {
        std::uint64_t size = ref_.size();
        require(size > 0, i, "delete from an empty dictionary");
        if (tail_) {
            require(op.key == ref_.at(size), i,
                    "the tail structure only deletes the current maximum");
            tail_->delete_tail();
        } else {
            std::uint64_t r = ref_rank(op.key);
            require(r <= size && ref_.at(r) == op.key, i, "deleted key is not present");
            if (rand_) {
                rand_->delete_at(handles_.at(op.key));
                handles_.erase(op.key);
            } else {
                subject_->erase(op.key);
            }
        }
        ref_.erase(op.key);
    }

    void do_search(std::uint64_t i, const Op& op, const RunOptions& opts, ProbeReport& report) {
        std::uint64_t size = ref_.size();
        require(size > 0, i, "search in an empty dictionary");
        std::uint64_t f = ref_rank(op.finger);
        require(f <= size && ref_.at(f) == op.finger, i, "finger key is not present");
        OracleHit expect = ref_.finger_search(f, op.key);
        Key expect_key = expect.position ? ref_.at(expect.position) : 0;

        Key got = 0;
        std::uint64_t probes = 0;
        std::uint64_t nanos = 0;
        if (tail_) {
            std::uint64_t before = tail_->instr().probe_count();
            auto t0 = std::chrono::steady_clock::now();
            std::uint64_t pos = tail_->search_star(f, op.key);
            auto t1 = std::chrono::steady_clock::now();
            probes = tail_->instr().probe_count() - before;
            nanos = std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
            got = pos ? tail_->at(pos) : 0;
        } else if (rand_) {
            std::uint64_t before = rand_->instr().probe_count();
            auto t0 = std::chrono::steady_clock::now();
            std::uint64_t h = rand_->pred_search(handles_.at(op.finger), op.key);
            auto t1 = std::chrono::steady_clock::now();
            probes = rand_->instr().probe_count() - before;
            nanos = std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
            got = h ? rand_->key_of(h) : 0;
        } else {
            std::uint64_t before = subject_->instr().probe_count();
            auto t0 = std::chrono::steady_clock::now();
            OracleHit hit = subject_->finger_search(f, op.key);
            auto t1 = std::chrono::steady_clock::now();
            probes = subject_->instr().probe_count() - before;
            nanos = std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
            got = hit.position ? subject_->at(hit.position) : 0;
        }
        if (opts.fault) got = opts.fault(i, got);
        if (got != expect_key) {
            std::ostringstream os;
            os << "pred(" << op.key << ") from finger " << op.finger << " returned ";
            if (got) os << got; else os << "none";
            os << ", reference says ";
            if (expect_key) os << expect_key; else os << "none";
            diverge(i, os.str());
        }
        report.rows.push_back(ProbeRow{structure_name(spec_.structure), size, expect.distance,
                                       probes, nanos, "search"});
    }

    WorkloadSpec spec_;
    std::unique_ptr<TailFingerDict> tail_;
    std::unique_ptr<RandomizedFingerDict> rand_;
    std::unique_ptr<OracleDict> subject_;
    std::unordered_map<Key, std::uint64_t> handles_;
    OracleDict ref_;
};

}  // namespace

ProbeReport run_workload(const WorkloadSpec& spec, const Workload& w, const RunOptions& opts) {
    spec.validate();
    ProbeReport report;
    Runner runner(spec, w.initial);
    runner.run(w.ops, opts, report);
    return report;
}

ProbeReport run_spec(const WorkloadSpec& spec, const RunOptions& opts) {
    return run_workload(spec, generate_workload(spec), opts);
}

// ---------------------------------------------------------------------------
// CSV

std::string csv_string(const ProbeReport& report) {
    std::string out = "structure,n,d,probes,wall_nanos,op_kind\n";
    char buf[128];
    for (const ProbeRow& r : report.rows) {
        out += r.structure;
        std::snprintf(buf, sizeof buf, ",%llu,%llu,%llu,%llu,",
                      static_cast<unsigned long long>(r.n),
                      static_cast<unsigned long long>(r.d),
                      static_cast<unsigned long long>(r.probes),
                      static_cast<unsigned long long>(r.wall_nanos));
        out += buf;
        out += r.op_kind;
        out += '\n';
    }
    return out;
}

void emit_csv(const ProbeReport& report, const std::string& path) {
    // Binary mode so the line endings stay LF everywhere.
    std::ofstream ofs(path, std::ios::binary);
    if (!ofs) throw IoFailure("cannot open '" + path + "' for writing");
    std::string body = csv_string(report);
    ofs.write(body.data(), static_cast<std::streamsize>(body.size()));
    ofs.flush();
    if (!ofs) throw IoFailure("short write to '" + path + "'");
}

// ---------------------------------------------------------------------------
// Replay files

std::vector<Op> parse_ops_text(const std::string& text) {
    std::vector<Op> ops;
    std::istringstream in(text);
    std::string line;
    std::uint64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string tok;
        std::vector<std::string> fields;
        while (ls >> tok) fields.push_back(tok);
        if (fields.empty() || fields[0][0] == '#') continue;
        auto fail = [&](const std::string& what) {
            throw InvalidSpec("ops line " + std::to_string(lineno) + ": " + what);
        };
        const std::string& k = fields[0];
        Op op{};
        if (k == "A" || k == "D") {
            if (fields.size() != 2) fail(k + " takes exactly one key");
            op.kind = k[0];
            op.key = parse_u64(fields[1], "key");
        } else if (k == "I" || k == "S") {
            if (fields.size() != 3) fail(k + " takes a finger key and a key");
            op.kind = k[0];
            op.finger = parse_u64(fields[1], "finger key");
            op.key = parse_u64(fields[2], "key");
        } else {
            fail("unknown op '" + k + "' (expected A, I, D, or S)");
        }
        ops.push_back(op);
    }
    return ops;
}

std::vector<Op> load_ops_file(const std::string& path) {
    std::ifstream ifs(path, std::ios::binary);
    if (!ifs) throw IoFailure("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << ifs.rdbuf();
    return parse_ops_text(buf.str());
}

}  // namespace fingerdict
