#include "fingerdict/pebble_game.hpp"

#include <algorithm>
#include <map>
#include <queue>

namespace fingerdict {

const char* adversary_name(AdversaryKind kind) {
    switch (kind) {
        case AdversaryKind::kConcentrate: return "concentrate";
        case AdversaryKind::kRoundRobin: return "round_robin";
        case AdversaryKind::kRandomSpread: return "random_spread";
        case AdversaryKind::kRevisit: return "revisit";
    }
    return "unknown";
}

bool adversary_from_name(const std::string& name, AdversaryKind& out) {
    for (AdversaryKind k : {AdversaryKind::kConcentrate, AdversaryKind::kRoundRobin,
                            AdversaryKind::kRandomSpread, AdversaryKind::kRevisit}) {
        if (name == adversary_name(k)) {
            out = k;
            return true;
        }
    }
    return false;
}

void apply_increaser(GameState& state, const IncreaserMove& move, std::uint64_t c) {
    if (move.sum() != c) throw BudgetMismatch();
    for (auto& [pile, d] : move.deltas) {
        state.piles.at(pile) += d;
        state.max_seen = std::max(state.max_seen, state.piles[pile]);
    }
}

namespace {

// Sub-step 1: pick a pile with probability delta_i / c by cumulative-sum
// inversion over the sparse move and zero it.
void zero_drawn_pile(GameState& state, const IncreaserMove& last, std::uint64_t c,
                     SplitMix64& rng) {
    const std::uint64_t r = rng.bounded(c);
    std::uint64_t acc = 0;
    for (auto& [pile, d] : last.deltas) {
        acc += d;
        if (r < acc) {
            state.piles.at(pile) = 0;
            return;
        }
    }
}

}  // namespace

void d_move(GameState& state, const IncreaserMove& last, std::uint64_t c, SplitMix64& rng,
            DMode mode) {
    if (last.sum() != c) throw BudgetMismatch();
    const bool do_draw = mode == DMode::kBoth || state.round % 2 == 0;
    const bool do_max = mode == DMode::kBoth || state.round % 2 == 1;
    if (do_draw) zero_drawn_pile(state, last, c, rng);
    if (do_max) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < state.piles.size(); ++i)
            if (state.piles[i] > state.piles[best]) best = i;  // ties keep the lowest index
        state.piles[best] = 0;
    }
    ++state.round;
}

std::vector<IncreaserMove> adversary_script(AdversaryKind kind, std::uint32_t n, std::uint64_t c,
                                            std::uint64_t rounds, std::uint64_t seed) {
    fd_require(n > 0 && c > 0, "pebble game needs piles and a positive budget");
    SplitMix64 rng(seed);
    std::vector<IncreaserMove> script;
    script.reserve(rounds);
    std::vector<std::uint64_t> boosts;  // revisit's own-move history
    std::uint32_t best_pile = 0;
    if (kind == AdversaryKind::kRevisit) boosts.assign(n, 0);
    for (std::uint64_t round = 0; round < rounds; ++round) {
        IncreaserMove move;
        switch (kind) {
            case AdversaryKind::kConcentrate:
                move.deltas.emplace_back(0, c);
                break;
            case AdversaryKind::kRoundRobin:
                move.deltas.emplace_back(static_cast<std::uint32_t>(round % n), c);
                break;
            case AdversaryKind::kRandomSpread: {
                std::map<std::uint32_t, std::uint64_t> spread;
                for (std::uint64_t u = 0; u < c; ++u)
                    ++spread[static_cast<std::uint32_t>(rng.bounded(n))];
                move.deltas.assign(spread.begin(), spread.end());
                break;
            }
            case AdversaryKind::kRevisit: {
                // Explore a random pile on even rounds, hammer the pile it
                // has boosted hardest on odd rounds.  Oblivious either way:
                // only its own history is consulted.
                const std::uint32_t pile = round % 2 == 0
                                               ? static_cast<std::uint32_t>(rng.bounded(n))
                                               : best_pile;
                move.deltas.emplace_back(pile, c);
                boosts[pile] += c;
                if (boosts[pile] > boosts[best_pile] ||
                    (boosts[pile] == boosts[best_pile] && pile < best_pile))
                    best_pile = pile;
                break;
            }
        }
        script.push_back(std::move(move));
    }
    return script;
}

namespace {

struct HeapEntry {
    std::uint64_t value;
    std::uint32_t pile;
};
struct HeapOrder {
    bool operator()(const HeapEntry& a, const HeapEntry& b) const {
        if (a.value != b.value) return a.value < b.value;
        return a.pile > b.pile;  // lowest pile index wins ties
    }
};

}  // namespace

GameResult run_script(std::uint32_t n, std::uint64_t c, const std::vector<IncreaserMove>& script,
                      std::uint64_t seed, DMode mode) {
    GameState state(n);
    SplitMix64 rng(seed);
    std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapOrder> heap;
    GameResult result;
    result.round_maxima.reserve(script.size());

    auto clean_top = [&]() {  // drop entries whose pile has moved on
        while (!heap.empty() && state.piles[heap.top().pile] != heap.top().value) heap.pop();
    };

    for (const IncreaserMove& move : script) {
        if (move.sum() != c) throw BudgetMismatch();
        for (auto& [pile, d] : move.deltas) {
            state.piles.at(pile) += d;
            state.max_seen = std::max(state.max_seen, state.piles[pile]);
            heap.push(HeapEntry{state.piles[pile], pile});
        }
        clean_top();
        result.round_maxima.push_back(heap.empty() ? 0 : heap.top().value);

        const bool do_draw = mode == DMode::kBoth || state.round % 2 == 0;
        const bool do_max = mode == DMode::kBoth || state.round % 2 == 1;
        if (do_draw) zero_drawn_pile(state, move, c, rng);
        if (do_max) {
            clean_top();
            if (!heap.empty() && heap.top().value > 0) {
                state.piles[heap.top().pile] = 0;
                heap.pop();
            }
        }
        ++state.round;
    }
    result.max_pile = state.max_seen;
    return result;
}

GameResult run_game(std::uint32_t n, std::uint64_t c, std::uint64_t rounds, AdversaryKind kind,
                    std::uint64_t seed, DMode mode) {
    const std::vector<IncreaserMove> script = adversary_script(kind, n, c, rounds, seed);
    // D draws from a stream independent of the adversary's.
    return run_script(n, c, script, seed ^ 0x9e3779b97f4a7c15ull, mode);
}

}  // namespace fingerdict
