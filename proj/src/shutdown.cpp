#include "powerseek/shutdown.hpp"

#include "powerseek/random.hpp"

#include <algorithm>
#include <sstream>

namespace powerseek {

template <typename Scalar>
ActionSets ShutdownScenario<Scalar>::action_sets() const {
    ActionSets sets;
    sets.state = s_new;
    sets.a0 = {shutdown_action};
    for (int a = 0; a < mdp.action_count(s_new); ++a) {
        if (a != shutdown_action) sets.a1.push_back(a);
    }
    return sets;
}

bool ValidationReport::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const ScenarioCheck& c) { return c.passed || c.warning_only; });
}

std::vector<std::string> ValidationReport::failures() const {
    std::vector<std::string> out;
    for (const auto& c : checks) {
        if (!c.passed && !c.warning_only) out.push_back(c.name + ": " + c.detail);
    }
    return out;
}

namespace {

template <typename Scalar>
std::string state_list(const TabularMdp<Scalar>& mdp, const std::vector<int>& states) {
    std::ostringstream out;
    for (std::size_t i = 0; i < states.size(); ++i) out << (i ? ", " : "") << mdp.state_name(states[i]);
    return out.str();
}

template <typename Scalar>
bool exceeds_one(const Scalar& x) {
    return x > 1;
}

}  // namespace

template <typename Scalar>
std::vector<int> reachable_recurrent_states(const ShutdownScenario<Scalar>& scenario) {
    const auto& mdp = scenario.mdp;
    const RecurrenceReport recurrence = recurrent_states(mdp);
    const StatePartition partition = partition_states(mdp, scenario.training, scenario.s_new);
    std::vector<int> out;
    for (int s : partition.reach) {
        if (!recurrence.is_recurrent(s)) continue;
        if (!almost_sure_region(mdp, s)[scenario.s_new]) continue;
        out.push_back(s);
    }
    return out;
}

template <typename Scalar>
std::vector<GammaThreshold> gamma_thresholds(const ShutdownScenario<Scalar>& scenario) {
    std::vector<GammaThreshold> out;
    for (int s : reachable_recurrent_states(scenario)) out.push_back(gamma_star(scenario.mdp, scenario.s_new, s));
    return out;
}

template <typename Scalar>
std::vector<int> qualifying_recurrent_states(const ShutdownScenario<Scalar>& scenario, const Scalar& gamma) {
    check_discount(gamma);
    std::vector<int> out;
    for (int s : reachable_recurrent_states(scenario)) {
        const Policy policy = reach_and_revisit(scenario.mdp, scenario.s_new, s);
        if (exceeds_one(visit_count(scenario.mdp, policy, scenario.s_new, s, gamma))) out.push_back(s);
    }
    return out;
}

template <typename Scalar>
ValidationReport validate_scenario(const ShutdownScenario<Scalar>& scenario, const std::optional<Scalar>& gamma) {
    ValidationReport report;
    auto add = [&](std::string name, bool passed, std::string detail, bool warning = false) {
        report.checks.push_back({std::move(name), passed, warning, passed ? std::string() : std::move(detail)});
    };
    const auto& mdp = scenario.mdp;
    const int d = mdp.state_count();

    try {
        mdp.validate();
        add("mdp", true, {});
    } catch (const std::exception& e) {
        add("mdp", false, e.what());
        return report;
    }
    const bool indices_ok = scenario.s_new >= 0 && scenario.s_new < d && scenario.s_term >= 0 && scenario.s_term < d &&
                            scenario.shutdown_action >= 0 && scenario.shutdown_action < mdp.action_count(scenario.s_new);
    add("indices", indices_ok, "s_new, s_term or the shutdown action is out of range");
    if (!indices_ok) return report;

    bool training_ok = true;
    try {
        scenario.training.validate(mdp);
    } catch (const std::exception& e) {
        training_ok = false;
        add("training", false, e.what());
    }
    if (training_ok) add("training", true, {});

    bool reward_ok = scenario.reward.size() == d;
    std::string reward_detail = "reward vector has the wrong length";
    if (reward_ok) {
        for (int s = 0; s < d; ++s) {
            if (scenario.reward(s) < 0) {
                reward_ok = false;
                reward_detail = "reward of " + mdp.state_name(s) + " is negative";
                break;
            }
        }
    }
    add("rewards_nonnegative", reward_ok, reward_detail);

    add("s_new_ood", !scenario.training.contains(scenario.s_new), "s_new was visited in training");
    add("s_term_ood", !scenario.training.contains(scenario.s_term), "s_term was visited in training");
    add("s_term_terminal", mdp.is_terminal(scenario.s_term), "s_term is not a terminal state");

    const auto& shutdown = mdp.outcomes(scenario.s_new, scenario.shutdown_action);
    const bool sure = shutdown.size() == 1 && shutdown[0].next == scenario.s_term && shutdown[0].prob == Scalar(1);
    add("shutdown_action", sure, "the shutdown action does not lead to s_term with probability 1");
    add("a1_nonempty", mdp.action_count(scenario.s_new) > 1, "s_new has no action besides shutdown");

    if (!training_ok || scenario.training.contains(scenario.s_new)) return report;

    const StatePartition partition = partition_states(mdp, scenario.training, scenario.s_new);
    report.reach = partition.reach;
    std::vector<int> overlap;
    for (int s : partition.reach) {
        if (scenario.training.contains(s)) overlap.push_back(s);
    }
    add("distributional_shift", overlap.empty(),
        "training states reachable from s_new: " + state_list(mdp, overlap));

    report.recurrent_reachable = reachable_recurrent_states(scenario);

    // Swapping rewards keeps a vector training-compatible only if the
    // swapped states cannot influence values at training states.
    const auto violations = closure_violations(mdp, scenario.training);
    std::vector<int> exposed;
    for (int s : violations) {
        const bool swapped = s == scenario.s_term || std::find(report.recurrent_reachable.begin(),
                                                               report.recurrent_reachable.end(),
                                                               s) != report.recurrent_reachable.end();
        if (swapped) exposed.push_back(s);
    }
    add("swap_closure", exposed.empty(), "swap partners reachable from training states: " + state_list(mdp, exposed),
        true);

    if (gamma) {
        report.qualifying = qualifying_recurrent_states(scenario, *gamma);
        add("qualifying_recurrent", !report.qualifying.empty(),
            "no reachable recurrent state has gamma* below gamma = " + to_string(*gamma));
    }
    return report;
}

template <typename Scalar>
SwapFamily retargeting_swaps(const ShutdownScenario<Scalar>& scenario, const Scalar& gamma) {
    SwapFamily family;
    const int d = scenario.mdp.state_count();
    for (int s : qualifying_recurrent_states(scenario, gamma)) {
        family.swaps.push_back(Permutation::transposition(d, scenario.s_term, s));
        family.partners.push_back(s);
    }
    if (family.swaps.empty()) family.warning = "no qualifying recurrent state; the majority bound is vacuous";
    return family;
}

template <typename Scalar>
PropRecRecord<Scalar> verify_prop_rec(const ShutdownScenario<Scalar>& scenario, const Vector<Scalar>& theta,
                                      int s_rec, const Scalar& gamma) {
    check_discount(gamma);
    check_reward(scenario.mdp, theta);
    const auto candidates = reachable_recurrent_states(scenario);
    if (std::find(candidates.begin(), candidates.end(), s_rec) == candidates.end()) {
        throw InvalidArgument("verify_prop_rec: " + scenario.mdp.state_name(s_rec) +
                              " is not a recurrent state almost surely reachable from s_new");
    }
    const Policy rec_policy = reach_and_revisit(scenario.mdp, scenario.s_new, s_rec);

    PropRecRecord<Scalar> record;
    record.s_rec = s_rec;
    record.gamma = gamma;
    record.visit_count = visit_count(scenario.mdp, rec_policy, scenario.s_new, s_rec, gamma);
    if (!exceeds_one(record.visit_count)) {
        throw InvalidArgument("verify_prop_rec: gamma = " + to_string(gamma) + " does not exceed gamma* of " +
                              scenario.mdp.state_name(s_rec));
    }

    const ActionSets sets = scenario.action_sets();
    auto best_other = [&](const QTable<Scalar>& q) {
        Scalar best = q(scenario.s_new, sets.a1.front());
        for (int a : sets.a1) {
            if (best < q(scenario.s_new, a)) best = q(scenario.s_new, a);
        }
        return best;
    };
    auto greedy_has_shutdown = [&](const QTable<Scalar>& q) {
        const auto greedy = greedy_actions(q, scenario.s_new);
        return std::find(greedy.begin(), greedy.end(), scenario.shutdown_action) != greedy.end();
    };

    const QTable<Scalar> q = optimal_q(scenario.mdp, theta, gamma);
    record.q_shutdown = q(scenario.s_new, scenario.shutdown_action);
    record.q_best_other = best_other(q);
    const bool shutdown_greedy = greedy_has_shutdown(q);
    const bool alone = greedy_actions(q, scenario.s_new).size() == 1;
    record.hypothesis = shutdown_greedy && alone;
    record.tie_case = shutdown_greedy && !alone;
    record.reward_gap = theta(scenario.s_term) > theta(s_rec);

    const Vector<Scalar> swapped = Permutation::transposition(theta.size(), scenario.s_term, s_rec).apply(theta);
    const QTable<Scalar> q_swapped = optimal_q(scenario.mdp, swapped, gamma);
    record.q_swapped_shutdown = q_swapped(scenario.s_new, scenario.shutdown_action);
    record.q_swapped_best_other = best_other(q_swapped);
    record.swapped_avoids = !greedy_has_shutdown(q_swapped);

    const Scalar rec_return = evaluate_policy(scenario.mdp, theta, rec_policy, gamma)(scenario.s_new);
    const Scalar bound = gamma * theta(s_rec) * record.visit_count;
    record.proof_bound_strict = bound < rec_return;
    return record;
}

template <typename Scalar>
Evaluator<Scalar> goal_set_evaluator(const ShutdownScenario<Scalar>& scenario, GoalSetMode mode,
                                     const Scalar& gamma) {
    const ActionSets sets = scenario.action_sets();
    return [&scenario, sets, mode, gamma](const Vector<Scalar>& v) {
        const QTable<Scalar> q = optimal_q(scenario.mdp, v, gamma);
        Evaluation e;
        e.member = mode == GoalSetMode::QOptimal ? in_goal_set(q, scenario.training)
                                                 : in_goal_set(v, scenario.mdp, scenario.training, mode, gamma);
        e.label = decide(q, sets);
        return e;
    };
}

template <typename Scalar>
ShutdownStats<Scalar> avoid_shutdown_stats(const ShutdownScenario<Scalar>& scenario,
                                           const std::vector<Vector<Scalar>>& goals, const Scalar& gamma,
                                           const StatsOptions& options) {
    ShutdownStats<Scalar> stats;
    stats.gamma = gamma;
    const SwapFamily family = retargeting_swaps(scenario, gamma);
    stats.n = family.n();
    stats.vacuous = stats.n == 0;
    stats.guaranteed_fraction = family.guaranteed_fraction();

    const Evaluator<Scalar> evaluate = goal_set_evaluator(scenario, options.mode, gamma);
    const bool sampled = scenario.mdp.state_count() > kOrbitDimensionCap;
    std::size_t prefers_a1 = 0, passes = 0, certified = 0, certificates = 0;
    for (std::size_t g = 0; g < goals.size(); ++g) {
        GoalOrbitStats<Scalar> entry;
        entry.theta = goals[g];
        entry.own_label = evaluate(goals[g]).label;
        const OrbitReport<Scalar> orbit =
            labeled_orbit<Scalar>(goals[g], evaluate, sampled ? options.sampled_draws : 0, derive_seed(options.seed, g));
        entry.orbit_size = orbit.size();
        entry.a1 = orbit.a1_preferred;
        entry.a0 = orbit.a0_preferred;
        entry.ties = orbit.ties;
        entry.approximate = orbit.approximate;
        entry.majority = verify_majority(orbit, stats.n);
        if (options.certify && stats.n > 0) {
            const auto cert = certify_retargetable<Scalar>(orbit, family.swaps, evaluate);
            entry.certified = cert.certified();
            entry.counterexample = cert.counterexample;
            ++certificates;
            if (cert.certified()) ++certified;
        }
        if (entry.own_label == Preference::PrefersA1) ++prefers_a1;
        if (entry.majority) ++passes;
        stats.approximate = stats.approximate || orbit.approximate;
        stats.goals.push_back(std::move(entry));
    }
    if (!goals.empty()) {
        stats.empirical_a1_fraction = static_cast<double>(prefers_a1) / static_cast<double>(goals.size());
        stats.orbit_pass_rate = static_cast<double>(passes) / static_cast<double>(goals.size());
    }
    if (certificates > 0) stats.certified_fraction = static_cast<double>(certified) / static_cast<double>(certificates);
    return stats;
}

#define POWERSEEK_INSTANTIATE(S)                                                                                    \
    template struct ShutdownScenario<S>;                                                                            \
    template std::vector<int> reachable_recurrent_states<S>(const ShutdownScenario<S>&);                            \
    template std::vector<GammaThreshold> gamma_thresholds<S>(const ShutdownScenario<S>&);                           \
    template std::vector<int> qualifying_recurrent_states<S>(const ShutdownScenario<S>&, const S&);                 \
    template ValidationReport validate_scenario<S>(const ShutdownScenario<S>&, const std::optional<S>&);            \
    template SwapFamily retargeting_swaps<S>(const ShutdownScenario<S>&, const S&);                                 \
    template PropRecRecord<S> verify_prop_rec<S>(const ShutdownScenario<S>&, const Vector<S>&, int, const S&);      \
    template Evaluator<S> goal_set_evaluator<S>(const ShutdownScenario<S>&, GoalSetMode, const S&);                 \
    template ShutdownStats<S> avoid_shutdown_stats<S>(const ShutdownScenario<S>&, const std::vector<Vector<S>>&,    \
                                                      const S&, const StatsOptions&);

POWERSEEK_INSTANTIATE(double)
POWERSEEK_INSTANTIATE(Rational)

#undef POWERSEEK_INSTANTIATE

}  // namespace powerseek
