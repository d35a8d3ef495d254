// Python bindings: the two finger-search dictionaries, the flat reference
// dictionary, the pebble-game simulator, and the workload/CSV pipeline.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "fingerdict/bucket_layer.hpp"
#include "fingerdict/common.hpp"
#include "fingerdict/oracle.hpp"
#include "fingerdict/pebble_game.hpp"
#include "fingerdict/randomized_dict.hpp"
#include "fingerdict/workload.hpp"

namespace py = pybind11;
namespace fd = fingerdict;

namespace {

fd::WorkloadSpec make_spec(const std::string& structure, std::uint64_t n, std::uint64_t ops,
                           std::tuple<double, double, double> mix, const std::string& dist,
                           std::uint64_t seed) {
    fd::WorkloadSpec spec;
    spec.structure = fd::structure_from_name(structure);
    spec.n = n;
    spec.ops = ops;
    spec.mix_insert = std::get<0>(mix);
    spec.mix_delete = std::get<1>(mix);
    spec.mix_search = std::get<2>(mix);
    spec.dist = fd::DistanceDist::parse(dist);
    spec.seed = seed;
    spec.validate();
    return spec;
}

py::list rows_to_list(const fd::ProbeReport& rep) {
    py::list out;
    for (const auto& r : rep.rows) {
        out.append(py::make_tuple(r.structure, r.n, r.d, r.probes, r.wall_nanos, r.op_kind));
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Finger-search dictionaries over 64-bit keys with probe/work instrumentation";

    // Exception hierarchy: specific types register after the base so they are
    // matched first; anything else surfaces as DictError.
    static auto& base = py::register_exception<fd::DictError>(m, "DictError");
    py::register_exception<fd::KeyNotGreaterThanMax>(m, "KeyNotGreaterThanMax", base);
    py::register_exception<fd::EmptyStructure>(m, "EmptyStructure", base);
    py::register_exception<fd::KeyAbsent>(m, "KeyAbsent", base);
    py::register_exception<fd::NotSorted>(m, "NotSorted", base);
    py::register_exception<fd::DuplicateKey>(m, "DuplicateKey", base);
    py::register_exception<fd::KeyOutOfFingerRange>(m, "KeyOutOfFingerRange", base);
    py::register_exception<fd::StaleFinger>(m, "StaleFinger", base);
    py::register_exception<fd::BudgetMismatch>(m, "BudgetMismatch", base);
    py::register_exception<fd::InvalidSpec>(m, "InvalidSpec", base);
    py::register_exception<fd::IoFailure>(m, "IoFailure", base);
    static auto& diverged = py::register_exception<fd::DivergenceDetected>(m, "DivergenceDetected", base);
    (void)diverged;

    py::class_<fd::TailFingerDict>(m, "TailFingerDict",
                                   "Append-only finger dictionary: inserts above the maximum, "
                                   "deletes the maximum, searches from any rank handle.")
        .def(py::init<>())
        .def("insert_tail", &fd::TailFingerDict::insert_tail, py::arg("key"),
             "Append a key strictly above the maximum; returns its rank handle.")
        .def("delete_tail", &fd::TailFingerDict::delete_tail, "Remove the largest key.")
        .def("search_star", &fd::TailFingerDict::search_star, py::arg("finger"), py::arg("s"),
             "Rank of the largest key <= s starting from a rank handle; 0 when none exists.")
        .def("at", &fd::TailFingerDict::at, py::arg("rank"), "Key stored at a 1-based rank.")
        .def("size", &fd::TailFingerDict::size)
        .def("__len__", &fd::TailFingerDict::size)
        .def("capacity", &fd::TailFingerDict::capacity, "Current bucket capacity.")
        .def("counted_cells", &fd::TailFingerDict::counted_cells,
             "Allocated cells across buckets and the forest (linear in size).")
        .def("validate", &fd::TailFingerDict::validate, "Full structural audit.")
        .def("probe_count", [](const fd::TailFingerDict& d) { return d.instr().probe_count(); })
        .def("work_count", [](const fd::TailFingerDict& d) { return d.instr().work_count(); });

    py::class_<fd::RandomizedFingerDict>(
        m, "RandomizedFingerDict",
        "General finger dictionary: finger-relative inserts and deletes anywhere, stable "
        "integer handles, randomized bucket maintenance.")
        .def(py::init<std::uint64_t>(), py::arg("seed") = 0)
        .def("insert_first", &fd::RandomizedFingerDict::insert_first, py::arg("key"),
             "Insert below the current minimum (or into an empty dictionary); returns a handle.")
        .def("insert_at", &fd::RandomizedFingerDict::insert_at, py::arg("finger"), py::arg("key"),
             "Insert a key between the finger's key and its successor; returns a handle.")
        .def("delete_at", &fd::RandomizedFingerDict::delete_at, py::arg("handle"))
        .def("finger_search", &fd::RandomizedFingerDict::finger_search, py::arg("finger"),
             py::arg("s"), "Handle of s, which must be stored; raises KeyAbsent otherwise.")
        .def("pred_search", &fd::RandomizedFingerDict::pred_search, py::arg("finger"),
             py::arg("s"), "Handle of the largest key <= s; 0 when none exists.")
        .def("key_of", &fd::RandomizedFingerDict::key_of, py::arg("handle"))
        .def("alive", &fd::RandomizedFingerDict::alive, py::arg("handle"))
        .def("size", &fd::RandomizedFingerDict::size)
        .def("__len__", &fd::RandomizedFingerDict::size)
        .def("bucket_target", &fd::RandomizedFingerDict::bucket_target)
        .def("bucket_sizes", &fd::RandomizedFingerDict::bucket_sizes)
        .def("guard_activations", &fd::RandomizedFingerDict::guard_activations)
        .def("validate", &fd::RandomizedFingerDict::validate, "Full structural audit.")
        .def("probe_count",
             [](const fd::RandomizedFingerDict& d) { return d.instr().probe_count(); })
        .def("work_count",
             [](const fd::RandomizedFingerDict& d) { return d.instr().work_count(); });

    py::class_<fd::OracleDict>(m, "OracleDict",
                               "Flat sorted reference dictionary with a galloping finger "
                               "search; the differential baseline.")
        .def(py::init<>())
        .def_static(
            "bulk_load",
            [](const std::vector<fd::Key>& keys) { return fd::OracleDict::bulk_load(keys); },
            py::arg("sorted_keys"))
        .def("insert", &fd::OracleDict::insert, py::arg("key"),
             "Insert a key; returns its 1-based rank.")
        .def("erase", &fd::OracleDict::erase, py::arg("key"))
        .def(
            "finger_search",
            [](const fd::OracleDict& d, std::uint64_t finger, fd::Key s) {
                fd::OracleHit hit = d.finger_search(finger, s);
                return py::make_tuple(hit.position, hit.distance);
            },
            py::arg("finger"), py::arg("s"),
            "(predecessor rank, rank distance) from a 1-based finger rank.")
        .def("at", &fd::OracleDict::at, py::arg("rank"))
        .def("keys", &fd::OracleDict::keys)
        .def("size", &fd::OracleDict::size)
        .def("__len__", &fd::OracleDict::size)
        .def("probe_count", [](const fd::OracleDict& d) { return d.instr().probe_count(); });

    m.def(
        "pebble_run",
        [](std::uint32_t n, std::uint64_t c, std::uint64_t rounds, const std::string& adversary,
           std::uint64_t seed, const std::string& mode) {
            fd::AdversaryKind kind;
            if (!fd::adversary_from_name(adversary, kind)) {
                throw fd::InvalidSpec("unknown adversary '" + adversary + "'");
            }
            fd::DMode dm;
            if (mode == "both") dm = fd::DMode::kBoth;
            else if (mode == "alternate") dm = fd::DMode::kAlternate;
            else throw fd::InvalidSpec("mode must be 'both' or 'alternate'");
            fd::GameResult res = fd::run_game(n, c, rounds, kind, seed, dm);
            return py::make_tuple(res.max_pile, res.round_maxima);
        },
        py::arg("n"), py::arg("c"), py::arg("rounds"), py::arg("adversary"), py::arg("seed") = 0,
        py::arg("mode") = "both",
        "Play the pile-zeroing game; returns (max pile ever, per-round maxima).");

    m.def(
        "bench_rows",
        [](const std::string& structure, std::uint64_t n, std::uint64_t ops,
           std::tuple<double, double, double> mix, const std::string& dist, std::uint64_t seed) {
            return rows_to_list(fd::run_spec(make_spec(structure, n, ops, mix, dist, seed)));
        },
        py::arg("structure"), py::arg("n"), py::arg("ops"), py::arg("mix"),
        py::arg("dist") = "uniform", py::arg("seed") = 0,
        "Generate and replay a workload in lockstep with the reference; returns "
        "(structure, n, d, probes, wall_nanos, op_kind) tuples, one per search.");

    m.def(
        "bench_csv",
        [](const std::string& structure, std::uint64_t n, std::uint64_t ops,
           std::tuple<double, double, double> mix, const std::string& dist, std::uint64_t seed) {
            return fd::csv_string(fd::run_spec(make_spec(structure, n, ops, mix, dist, seed)));
        },
        py::arg("structure"), py::arg("n"), py::arg("ops"), py::arg("mix"),
        py::arg("dist") = "uniform", py::arg("seed") = 0,
        "Same as bench_rows, serialized as CSV with the standard header.");

    m.def(
        "replay_ops",
        [](const std::string& structure, const std::string& ops_text, std::uint64_t seed) {
            fd::WorkloadSpec spec;
            spec.structure = fd::structure_from_name(structure);
            spec.seed = seed;
            fd::Workload w;
            w.ops = fd::parse_ops_text(ops_text);
            fd::RunOptions opts;
            opts.validate_final = true;
            return rows_to_list(fd::run_workload(spec, w, opts));
        },
        py::arg("structure"), py::arg("ops_text"), py::arg("seed") = 0,
        "Replay an A/I/D/S script against the reference in lockstep; raises "
        "DivergenceDetected on any mismatch.");
}
