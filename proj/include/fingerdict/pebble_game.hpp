#ifndef FINGERDICT_PEBBLE_GAME_HPP
#define FINGERDICT_PEBBLE_GAME_HPP

// Discrete zeroing pebble game: an increaser spreads exactly c pebbles over
// n piles each round, a decreaser (player D) then zeroes up to two piles —
// one drawn with probability delta_i / c from the increaser's last move and
// one maximum pile (ties to the lowest index).  M is the largest pile value
// ever observed; the randomized dictionary's maintenance schedule is this
// game in disguise, so the simulator exists to measure M empirically.
//
// The increaser is oblivious: its whole move script is generated before any
// pile exists, so it cannot react to D no matter how an adversary kind is
// implemented.  Replays are deterministic per seed.

#include <cstdint>
#include <string>
#include <vector>

#include "fingerdict/common.hpp"

namespace fingerdict {

// Sparse budget-c move: (pile, delta) entries with every delta positive.
struct IncreaserMove {
    std::vector<std::pair<std::uint32_t, std::uint64_t>> deltas;
    std::uint64_t sum() const {
        std::uint64_t s = 0;
        for (auto& [pile, d] : deltas) s += d;
        return s;
    }
};

struct GameState {
    std::vector<std::uint64_t> piles;
    std::uint64_t max_seen = 0;  // M: running maximum over the whole game
    std::uint64_t round = 0;

    explicit GameState(std::uint32_t n) : piles(n, 0) {}
};

// Whether D performs both zeroing sub-steps every round or alternates them
// by round parity (sub-step 1 on even rounds).
enum class DMode : std::uint8_t { kBoth = 0, kAlternate = 1 };

enum class AdversaryKind : std::uint8_t {
    kConcentrate = 0,   // all c on pile 0, every round
    kRoundRobin = 1,    // all c on pile (round mod n)
    kRandomSpread = 2,  // c unit pebbles on independently drawn piles
    kRevisit = 3,       // alternates a random pile with its own-history argmax
};

const char* adversary_name(AdversaryKind kind);
bool adversary_from_name(const std::string& name, AdversaryKind& out);

// Applies one increaser move: piles grow, M updates.  Throws BudgetMismatch
// unless the deltas sum to exactly c.
void apply_increaser(GameState& state, const IncreaserMove& move, std::uint64_t c);

// One decreaser move per the strategy above; `last` is the increaser move
// this round answers.  Reference implementation with a linear max scan; the
// batch runner below reproduces it exactly with a lazy heap.
void d_move(GameState& state, const IncreaserMove& last, std::uint64_t c, SplitMix64& rng,
            DMode mode = DMode::kBoth);

// The adversary's entire script, generated up front from oblivious inputs
// only (kind, n, c, round index, seed).
std::vector<IncreaserMove> adversary_script(AdversaryKind kind, std::uint32_t n, std::uint64_t c,
                                            std::uint64_t rounds, std::uint64_t seed);

struct GameResult {
    std::uint64_t max_pile = 0;               // M
    std::vector<std::uint64_t> round_maxima;  // max pile right after each increaser move
};

// Alternates script moves with d_move for the whole script, heap-accelerated.
GameResult run_script(std::uint32_t n, std::uint64_t c, const std::vector<IncreaserMove>& script,
                      std::uint64_t seed, DMode mode = DMode::kBoth);

// Convenience: script generation + run.  The decreaser's draws consume a
// stream seeded independently of the adversary's.
GameResult run_game(std::uint32_t n, std::uint64_t c, std::uint64_t rounds, AdversaryKind kind,
                    std::uint64_t seed, DMode mode = DMode::kBoth);

}  // namespace fingerdict

#endif
