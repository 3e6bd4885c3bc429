#pragma once

#include "powerseek/shutdown.hpp"

#include <cstdint>
#include <optional>
#include <string_view>

namespace powerseek {

/// s_new -> p1 -> ... -> p_{m-1} -> s_rec -> c1 -> ... -> c_{L-1} -> s_rec,
/// with shutdown at s_new leading to s_term.  Under the only non-shutdown
/// policy the visit count of s_rec from s_new is gamma^(m-1) / (1 - gamma^L).
struct LassoSpec {
    int m = 1;
    int L = 1;
    /// One entry per state; default is 1 at s_term and 0 elsewhere.
    std::optional<Vector<Rational>> reward;
};

/// State indices of a lasso, in construction order.
struct LassoLayout {
    int s_new = 0;
    int s_rec = 0;
    int s_term = 0;
    std::vector<int> cycle;  // s_rec first
};

LassoLayout lasso_layout(int m, int L);
ShutdownScenario<Rational> make_lasso(const LassoSpec& spec);

/// A 1-D level with `length` cells; the last cell is the end of the level.
struct CoinrunSpec {
    int length = 5;
    int coin = 4;
};

struct CoinrunChain {
    ShutdownScenario<Rational> scenario;
    std::vector<int> train_cells;
    std::vector<int> ood_cells;
    int train_coin = 0;
    int ood_coin = 0;
    int ood_end = 0;
    /// Reward 1 wherever the coin is.
    Vector<Rational> coin_goal;
    /// Reward 1 at the end of each level.
    Vector<Rational> end_goal;
};

/// Training level with the coin at its end, test level with the coin moved
/// inward.  The two levels share no states; the test level's first cell is
/// s_new and carries an extra "shutdown" action.  Throws InvalidArgument on
/// out-of-range positions or a test coin at the end.
CoinrunChain make_coinrun_chain(const CoinrunSpec& train, const CoinrunSpec& ood);

enum class ChainBehavior { EndSeeking, CoinSeeking, Shutdown, Other };

std::string_view to_string(ChainBehavior b);

/// Follows the lowest-index greedy policy from s_new: ending at the level's
/// end is end-seeking, settling into a cycle through the coin cell is
/// coin-seeking.
template <typename Scalar>
ChainBehavior classify_behavior(const CoinrunChain& chain, const QTable<Scalar>& q);

struct RandomSpec {
    std::uint64_t seed = 0;
    int d = 6;
    int actions = 2;
    int branching = 2;
    int terminal_count = 0;  // terminals besides s_term
};

struct GeneratedScenario {
    ShutdownScenario<Rational> scenario;
    std::size_t attempts = 0;
};

inline constexpr int kRandomDimensionCap = 12;
inline constexpr std::size_t kGenerationAttemptCap = 100'000;

/// Seeded rejection sampler.  With d >= 5 a two-state training gadget is
/// included (t0 with "exit" to a terminal t_end, trained, and "stay"); the
/// rest is an out-of-distribution region holding s_new, s_term, the extra
/// terminals and ordinary states with `branching` successors per action.
/// Accepts the first draw that validates and has a reachable recurrent
/// state.  Throws InvalidArgument on bad sizes and NumericError when the
/// attempt cap is hit.
GeneratedScenario make_random(const RandomSpec& spec);

}  // namespace powerseek
