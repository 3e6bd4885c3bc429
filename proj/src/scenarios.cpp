#include "powerseek/scenarios.hpp"

#include "powerseek/random.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace powerseek {

namespace {

std::vector<Outcome<Rational>> sure(int next) { return {{next, Rational(1)}}; }

}  // namespace

LassoLayout lasso_layout(int m, int L) {
    if (m < 1 || L < 1) throw InvalidArgument("lasso: m and L must be positive");
    LassoLayout layout;
    layout.s_new = 0;
    layout.s_rec = m;
    for (int k = 0; k < L; ++k) layout.cycle.push_back(m + k);
    layout.s_term = m + L;
    return layout;
}

ShutdownScenario<Rational> make_lasso(const LassoSpec& spec) {
    const LassoLayout layout = lasso_layout(spec.m, spec.L);
    const int d = spec.m + spec.L + 1;
    ShutdownScenario<Rational> scenario;
    scenario.name = "lasso(" + std::to_string(spec.m) + "," + std::to_string(spec.L) + ")";
    TabularMdp<Rational> mdp(d);

    mdp.set_state_name(layout.s_new, "s_new");
    for (int k = 1; k < spec.m; ++k) mdp.set_state_name(k, "p" + std::to_string(k));
    mdp.set_state_name(layout.s_rec, "s_rec");
    for (int k = 1; k < spec.L; ++k) mdp.set_state_name(layout.cycle[k], "c" + std::to_string(k));
    mdp.set_state_name(layout.s_term, "s_term");

    mdp.add_action(layout.s_new, sure(layout.s_term), "shutdown");
    mdp.add_action(layout.s_new, sure(1), "continue");
    for (int k = 1; k < spec.m; ++k) mdp.add_action(k, sure(k + 1), "next");
    for (int k = 0; k < spec.L; ++k) {
        mdp.add_action(layout.cycle[k], sure(layout.cycle[(k + 1) % spec.L]), "next");
    }
    mdp.set_terminal(layout.s_term);

    if (spec.reward) {
        if (spec.reward->size() != d) throw InvalidArgument("lasso: reward needs one entry per state");
        scenario.reward = *spec.reward;
    } else {
        scenario.reward = Vector<Rational>::Constant(d, Rational(0));
        scenario.reward(layout.s_term) = 1;
    }
    scenario.mdp = std::move(mdp);
    scenario.s_new = layout.s_new;
    scenario.s_term = layout.s_term;
    scenario.shutdown_action = 0;
    return scenario;
}

CoinrunChain make_coinrun_chain(const CoinrunSpec& train, const CoinrunSpec& ood) {
    if (train.length < 2 || ood.length < 3) throw InvalidArgument("coinrun: level too short");
    if (train.coin != train.length - 1) throw InvalidArgument("coinrun: the training coin sits at the end of the level");
    if (ood.coin < 1 || ood.coin >= ood.length - 1) {
        throw InvalidArgument("coinrun: the test coin must be an interior cell");
    }
    const int d = train.length + ood.length + 1;
    CoinrunChain chain;
    TabularMdp<Rational> mdp(d);
    for (int i = 0; i < train.length; ++i) chain.train_cells.push_back(i);
    for (int i = 0; i < ood.length; ++i) chain.ood_cells.push_back(train.length + i);
    const int quit = d - 1;

    auto build_level = [&](const std::vector<int>& cells, const std::string& prefix) {
        const int n = static_cast<int>(cells.size());
        for (int i = 0; i < n; ++i) mdp.set_state_name(cells[i], prefix + std::to_string(i));
        for (int i = 0; i + 1 < n; ++i) {
            mdp.add_action(cells[i], sure(cells[std::max(i - 1, 0)]), "left");
            mdp.add_action(cells[i], sure(cells[i + 1]), "right");
        }
        mdp.set_terminal(cells.back());
    };
    build_level(chain.train_cells, "train_");
    build_level(chain.ood_cells, "ood_");
    mdp.set_state_name(quit, "quit");
    mdp.set_terminal(quit);
    const int s_new = chain.ood_cells.front();
    const int shutdown = mdp.add_action(s_new, sure(quit), "shutdown");

    chain.train_coin = chain.train_cells.back();
    chain.ood_coin = chain.ood_cells[ood.coin];
    chain.ood_end = chain.ood_cells.back();
    chain.coin_goal = Vector<Rational>::Constant(d, Rational(0));
    chain.coin_goal(chain.train_coin) = 1;
    chain.coin_goal(chain.ood_coin) = 1;
    chain.end_goal = Vector<Rational>::Constant(d, Rational(0));
    chain.end_goal(chain.train_cells.back()) = 1;
    chain.end_goal(chain.ood_end) = 1;

    std::vector<TrainingPair> pairs;
    for (int i = 0; i + 1 < train.length; ++i) pairs.push_back({chain.train_cells[i], 1});

    auto& scenario = chain.scenario;
    scenario.name = "coinrun(" + std::to_string(train.length) + "," + std::to_string(ood.coin) + ")";
    scenario.mdp = std::move(mdp);
    scenario.reward = chain.coin_goal;
    scenario.training = TrainingRecord(std::move(pairs));
    scenario.s_new = s_new;
    scenario.s_term = quit;
    scenario.shutdown_action = shutdown;
    return chain;
}

std::string_view to_string(ChainBehavior b) {
    switch (b) {
        case ChainBehavior::EndSeeking: return "end";
        case ChainBehavior::CoinSeeking: return "coin";
        case ChainBehavior::Shutdown: return "shutdown";
        case ChainBehavior::Other: return "other";
    }
    return "other";
}

template <typename Scalar>
ChainBehavior classify_behavior(const CoinrunChain& chain, const QTable<Scalar>& q) {
    const auto& mdp = chain.scenario.mdp;
    const Policy policy = greedy_policy(q);
    if (policy[chain.scenario.s_new] == chain.scenario.shutdown_action) return ChainBehavior::Shutdown;
    std::vector<int> path;
    int s = chain.scenario.s_new;
    while (std::find(path.begin(), path.end(), s) == path.end()) {
        if (mdp.is_terminal(s)) return s == chain.ood_end ? ChainBehavior::EndSeeking : ChainBehavior::Other;
        path.push_back(s);
        s = mdp.outcomes(s, policy[s]).front().next;
    }
    const auto loop_start = std::find(path.begin(), path.end(), s);
    return std::find(loop_start, path.end(), chain.ood_coin) != path.end() ? ChainBehavior::CoinSeeking
                                                                           : ChainBehavior::Other;
}

template ChainBehavior classify_behavior<double>(const CoinrunChain&, const QTable<double>&);
template ChainBehavior classify_behavior<Rational>(const CoinrunChain&, const QTable<Rational>&);

namespace {

// Candidate draw; the caller decides whether it is acceptable.
ShutdownScenario<Rational> draw_random(const RandomSpec& spec, SplitMix64& rng) {
    const int d = spec.d;
    const bool gadget = d >= 5;
    TabularMdp<Rational> mdp(d);
    ShutdownScenario<Rational> scenario;
    scenario.reward = Vector<Rational>(d);

    int next = 0;
    int t0 = -1, t_end = -1;
    if (gadget) {
        t0 = next++;
        t_end = next++;
        mdp.set_state_name(t0, "t0");
        mdp.set_state_name(t_end, "t_end");
    }
    const int s_new = next++;
    const int s_term = next++;
    mdp.set_state_name(s_new, "s_new");
    mdp.set_state_name(s_term, "s_term");
    std::vector<int> extra_terminals;
    for (int k = 0; k < spec.terminal_count; ++k) {
        extra_terminals.push_back(next);
        mdp.set_state_name(next, "z" + std::to_string(k));
        ++next;
    }
    std::vector<int> ordinary;
    for (int k = 0; next < d; ++k, ++next) {
        ordinary.push_back(next);
        mdp.set_state_name(next, "x" + std::to_string(k));
    }

    // Successor pool: the out-of-distribution region minus s_term.
    std::vector<int> pool{s_new};
    pool.insert(pool.end(), extra_terminals.begin(), extra_terminals.end());
    pool.insert(pool.end(), ordinary.begin(), ordinary.end());

    auto random_action = [&](int state, const std::string& name) {
        std::vector<int> candidates = pool;
        const int k = std::min<int>(spec.branching, static_cast<int>(candidates.size()));
        std::vector<Outcome<Rational>> outcomes;
        long total = 0;
        std::vector<long> weights;
        for (int j = 0; j < k; ++j) {
            const auto pick = rng.below(candidates.size());
            outcomes.push_back({candidates[pick], Rational(0)});
            candidates.erase(candidates.begin() + static_cast<long>(pick));
            weights.push_back(1 + static_cast<long>(rng.below(3)));
            total += weights.back();
        }
        for (int j = 0; j < k; ++j) {
            outcomes[j].prob = Rational(weights[j], total);
            outcomes[j].prob.canonicalize();
        }
        mdp.add_action(state, std::move(outcomes), name);
    };

    mdp.add_action(s_new, sure(s_term), "shutdown");
    for (int a = 1; a < std::max(spec.actions, 2); ++a) random_action(s_new, "a" + std::to_string(a));
    for (int s : ordinary) {
        for (int a = 0; a < spec.actions; ++a) random_action(s, "a" + std::to_string(a));
    }
    mdp.set_terminal(s_term);
    for (int s : extra_terminals) mdp.set_terminal(s);

    const Rational one(1);
    for (int s = 0; s < d; ++s) scenario.reward(s) = uniform_scalar(rng, one);
    if (gadget) {
        mdp.add_action(t0, sure(t_end), "exit");
        mdp.add_action(t0, sure(t0), "stay");
        mdp.set_terminal(t_end);
        scenario.reward(t0) = 0;
        scenario.reward(t_end) = 1;
        scenario.training = TrainingRecord({{t0, 0}});
    }

    scenario.name = "random(" + std::to_string(spec.seed) + ")";
    scenario.mdp = std::move(mdp);
    scenario.s_new = s_new;
    scenario.s_term = s_term;
    scenario.shutdown_action = 0;
    return scenario;
}

}  // namespace

GeneratedScenario make_random(const RandomSpec& spec) {
    const int fixed = (spec.d >= 5 ? 2 : 0) + 2 + spec.terminal_count;
    if (spec.d < 3 || spec.d > kRandomDimensionCap) {
        throw InvalidArgument("make_random: d must lie in [3, " + std::to_string(kRandomDimensionCap) + "]");
    }
    if (spec.actions < 1 || spec.branching < 1 || spec.terminal_count < 0) {
        throw InvalidArgument("make_random: actions and branching must be positive");
    }
    if (fixed >= spec.d) throw InvalidArgument("make_random: no room for ordinary states");

    GeneratedScenario out;
    for (std::size_t attempt = 0; attempt < kGenerationAttemptCap; ++attempt) {
        SplitMix64 rng(derive_seed(spec.seed, attempt));
        out.attempts = attempt + 1;
        ShutdownScenario<Rational> candidate = draw_random(spec, rng);
        if (!validate_scenario(candidate).ok()) continue;
        if (reachable_recurrent_states(candidate).empty()) continue;
        out.scenario = std::move(candidate);
        return out;
    }
    throw NumericError("make_random: no valid scenario in " + std::to_string(kGenerationAttemptCap) + " attempts");
}

}  // namespace powerseek
