// fingerbench: workload benchmarking and differential checking for the
// finger-search dictionaries, plus the pebble-game simulator.
//
//   fingerbench bench    --structure oracle --n 65536 --ops 10000 \
//                        --mix 0.25,0.25,0.5 --dist geometric:0.3 --seed 1 --csv out.csv
//   fingerbench diff     --structure randomized --ops-file script.txt
//   fingerbench pebble   --n 65536 --c 4 --rounds 65536 --seeds 100 --adversary all
//   fingerbench validate --structure nested-bdt --n 4096 --ops 20000 --seed 7
//
// Exit codes: 0 success, 1 lockstep divergence, 2 invalid specification or
// usage (including unreadable/unwritable files).

#include <cstdio>
#include <exception>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fingerdict/pebble_game.hpp"
#include "fingerdict/workload.hpp"

namespace fd = fingerdict;

namespace {

fd::WorkloadSpec spec_from(const std::string& structure, std::uint64_t n, std::uint64_t ops,
                           const std::string& mix, const std::string& dist, std::uint64_t seed) {
    fd::WorkloadSpec spec;
    spec.structure = fd::structure_from_name(structure);
    spec.n = n;
    spec.ops = ops;
    double parts[3];
    if (std::sscanf(mix.c_str(), "%lf,%lf,%lf", &parts[0], &parts[1], &parts[2]) != 3) {
        throw fd::InvalidSpec("mix must be three comma-separated proportions, e.g. 0.3,0.2,0.5");
    }
    spec.mix_insert = parts[0];
    spec.mix_delete = parts[1];
    spec.mix_search = parts[2];
    spec.dist = fd::DistanceDist::parse(dist);
    spec.seed = seed;
    spec.validate();
    return spec;
}

void write_text(const std::string& path, const std::string& body) {
    if (path.empty()) {
        std::fwrite(body.data(), 1, body.size(), stdout);
        return;
    }
    std::ofstream ofs(path, std::ios::binary);
    if (!ofs) throw fd::IoFailure("cannot open '" + path + "' for writing");
    ofs.write(body.data(), static_cast<std::streamsize>(body.size()));
    ofs.flush();
    if (!ofs) throw fd::IoFailure("short write to '" + path + "'");
}

void print_search_summary(const fd::ProbeReport& rep) {
    if (rep.rows.empty()) {
        std::fprintf(stderr, "no searches measured\n");
        return;
    }
    std::uint64_t total_probes = 0, max_probes = 0;
    for (const auto& r : rep.rows) {
        total_probes += r.probes;
        if (r.probes > max_probes) max_probes = r.probes;
    }
    std::fprintf(stderr, "%zu searches, mean probes %.2f, max probes %llu\n", rep.rows.size(),
                 static_cast<double>(total_probes) / static_cast<double>(rep.rows.size()),
                 static_cast<unsigned long long>(max_probes));
}

// Testing aid: corrupts the structure's answer at one op so the divergence
// path (exit code 1) can be exercised end to end.
fd::RunOptions fault_opts(std::uint64_t fault_at) {
    fd::RunOptions opts;
    if (fault_at != UINT64_MAX) {
        opts.fault = [fault_at](std::uint64_t op_index, fd::Key answer) -> fd::Key {
            return op_index == fault_at ? answer + 1 : answer;
        };
    }
    return opts;
}

int run_bench(const fd::WorkloadSpec& spec, const std::string& csv_path, std::uint64_t fault_at) {
    fd::ProbeReport rep = fd::run_spec(spec, fault_opts(fault_at));
    write_text(csv_path, fd::csv_string(rep));
    print_search_summary(rep);
    return 0;
}

int run_diff(const std::string& structure, const std::string& ops_file, std::uint64_t seed,
             std::uint64_t fault_at) {
    fd::WorkloadSpec spec;
    spec.structure = fd::structure_from_name(structure);
    spec.seed = seed;
    fd::Workload w;
    w.ops = fd::load_ops_file(ops_file);
    fd::RunOptions opts = fault_opts(fault_at);
    opts.validate_final = true;
    fd::ProbeReport rep = fd::run_workload(spec, w, opts);
    std::fprintf(stderr, "%zu ops replayed in lockstep, no divergence (%zu searches checked)\n",
                 w.ops.size(), rep.rows.size());
    return 0;
}

int run_validate(const fd::WorkloadSpec& spec) {
    fd::RunOptions opts;
    opts.validate_every = spec.ops ? std::max<std::uint64_t>(1, spec.ops / 16) : 0;
    opts.validate_final = true;
    fd::ProbeReport rep = fd::run_spec(spec, opts);
    std::fprintf(stderr,
                 "%s survived %llu ops with periodic self-checks (%zu searches verified)\n",
                 fd::structure_name(spec.structure), static_cast<unsigned long long>(spec.ops),
                 rep.rows.size());
    return 0;
}

int run_pebble(std::uint32_t n, std::uint64_t c, std::uint64_t rounds, std::uint64_t seeds,
               const std::string& adversary, const std::string& mode_name,
               const std::string& csv_path) {
    fd::DMode mode;
    if (mode_name == "both") {
        mode = fd::DMode::kBoth;
    } else if (mode_name == "alternate") {
        mode = fd::DMode::kAlternate;
    } else {
        throw fd::InvalidSpec("mode must be 'both' or 'alternate'");
    }
    std::vector<fd::AdversaryKind> kinds;
    if (adversary == "all") {
        kinds = {fd::AdversaryKind::kConcentrate, fd::AdversaryKind::kRoundRobin,
                 fd::AdversaryKind::kRandomSpread, fd::AdversaryKind::kRevisit};
    } else {
        fd::AdversaryKind k;
        if (!fd::adversary_from_name(adversary, k)) {
            throw fd::InvalidSpec("unknown adversary '" + adversary +
                                  "' (expected concentrate, round-robin, random-spread, "
                                  "revisit, or all)");
        }
        kinds.push_back(k);
    }
    std::string out = "seed,adversary,n,c,rounds,M\n";
    std::uint64_t worst = 0;
    char buf[160];
    for (fd::AdversaryKind k : kinds) {
        for (std::uint64_t seed = 0; seed < seeds; ++seed) {
            fd::GameResult res = fd::run_game(n, c, rounds, k, seed, mode);
            if (res.max_pile > worst) worst = res.max_pile;
            std::snprintf(buf, sizeof buf, "%llu,%s,%u,%llu,%llu,%llu\n",
                          static_cast<unsigned long long>(seed), fd::adversary_name(k), n,
                          static_cast<unsigned long long>(c),
                          static_cast<unsigned long long>(rounds),
                          static_cast<unsigned long long>(res.max_pile));
            out += buf;
        }
    }
    write_text(csv_path, out);
    std::fprintf(stderr, "worst pile across %llu games: %llu\n",
                 static_cast<unsigned long long>(seeds * kinds.size()),
                 static_cast<unsigned long long>(worst));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finger-search dictionary workbench"};
    app.require_subcommand(1);

    std::string structure = "oracle";
    std::uint64_t n = 1024;
    std::uint64_t ops = 1000;
    std::string mix = "0,0,1";
    std::string dist = "uniform";
    std::uint64_t seed = 0;
    std::string csv_path;
    std::string ops_file;
    std::uint64_t fault_at = UINT64_MAX;

    auto add_workload_flags = [&](CLI::App* cmd) {
        cmd->add_option("--structure", structure, "nested-bdt | randomized | oracle");
        cmd->add_option("--n", n, "keys preloaded before the measured ops");
        cmd->add_option("--ops", ops, "number of measured operations");
        cmd->add_option("--mix", mix, "insert,delete,search proportions (sum to 1)");
        cmd->add_option("--dist", dist, "uniform | geometric:<p> | fixed:<d>");
        cmd->add_option("--seed", seed, "workload seed");
    };

    CLI::App* bench = app.add_subcommand("bench", "generate a workload, replay it, emit CSV");
    add_workload_flags(bench);
    bench->add_option("--csv", csv_path, "output path (default: stdout)");
    bench->add_option("--inject-fault", fault_at, "testing aid: corrupt the answer at this op");

    CLI::App* diff = app.add_subcommand("diff", "replay an ops file against the reference");
    diff->add_option("--structure", structure, "nested-bdt | randomized | oracle");
    diff->add_option("--ops-file", ops_file, "script with A/I/D/S lines")->required();
    diff->add_option("--seed", seed, "seed reported on divergence");
    diff->add_option("--inject-fault", fault_at, "testing aid: corrupt the answer at this op");

    CLI::App* pebble = app.add_subcommand("pebble", "run the pile-zeroing game");
    std::uint32_t pebble_n = 65536;
    std::uint64_t pebble_c = 4;
    std::uint64_t pebble_rounds = 65536;
    std::uint64_t pebble_seeds = 10;
    std::string adversary = "all";
    std::string mode = "both";
    pebble->add_option("--n", pebble_n, "number of piles");
    pebble->add_option("--c", pebble_c, "pebbles added per round");
    pebble->add_option("--rounds", pebble_rounds, "rounds per game");
    pebble->add_option("--seeds", pebble_seeds, "seeds per adversary (0..seeds-1)");
    pebble->add_option("--adversary", adversary,
                       "concentrate | round-robin | random-spread | revisit | all");
    pebble->add_option("--mode", mode, "both | alternate");
    pebble->add_option("--csv", csv_path, "output path (default: stdout)");

    CLI::App* validate = app.add_subcommand("validate", "replay with periodic self-checks");
    add_workload_flags(validate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (bench->parsed()) {
            return run_bench(spec_from(structure, n, ops, mix, dist, seed), csv_path, fault_at);
        }
        if (diff->parsed()) {
            return run_diff(structure, ops_file, seed, fault_at);
        }
        if (pebble->parsed()) {
            return run_pebble(pebble_n, pebble_c, pebble_rounds, pebble_seeds, adversary, mode,
                              csv_path);
        }
        if (validate->parsed()) {
            return run_validate(spec_from(structure, n, ops, mix, dist, seed));
        }
    } catch (const fd::DivergenceDetected& e) {
        std::fprintf(stderr, "divergence: %s\n", e.what());
        return 1;
    } catch (const fd::InvalidSpec& e) {
        std::fprintf(stderr, "invalid spec: %s\n", e.what());
        return 2;
    } catch (const fd::IoFailure& e) {
        std::fprintf(stderr, "io failure: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
