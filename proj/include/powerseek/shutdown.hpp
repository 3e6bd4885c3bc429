#pragma once

#include "powerseek/goalset.hpp"
#include "powerseek/orbit.hpp"
#include "powerseek/recurrence.hpp"

#include <optional>
#include <string>
#include <vector>

namespace powerseek {

/// A new out-of-distribution state with a shutdown action leading surely to
/// a terminal state; every other action at s_new forms A1.
template <typename Scalar>
struct ShutdownScenario {
    std::string name;
    TabularMdp<Scalar> mdp;
    Vector<Scalar> reward;  // the training reward
    TrainingRecord training;
    int s_new = 0;
    int s_term = 0;
    int shutdown_action = 0;

    ActionSets action_sets() const;

    template <typename Other>
    ShutdownScenario<Other> cast() const {
        ShutdownScenario<Other> out;
        out.name = name;
        out.mdp = mdp.template cast<Other>();
        out.reward = Vector<Other>(reward.size());
        for (Eigen::Index i = 0; i < reward.size(); ++i) {
            if constexpr (std::is_same_v<Other, Scalar>) {
                out.reward(i) = reward(i);
            } else if constexpr (std::is_same_v<Other, double>) {
                out.reward(i) = to_double(reward(i));
            } else {
                out.reward(i) = rational_from_double(reward(i));
            }
        }
        out.training = training;
        out.s_new = s_new;
        out.s_term = s_term;
        out.shutdown_action = shutdown_action;
        return out;
    }
};

struct ScenarioCheck {
    std::string name;
    bool passed = true;
    bool warning_only = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<ScenarioCheck> checks;
    std::vector<int> reach;
    std::vector<int> recurrent_reachable;  // S^1_rec
    std::vector<int> qualifying;           // S^gamma_rec when a gamma was given

    /// True when no non-warning check failed.
    bool ok() const;
    std::vector<std::string> failures() const;
};

/// Checks every assumption of the shutdown setting; with a discount also
/// that some reachable recurrent state qualifies.  Never throws on a bad
/// scenario -- failures are listed in the report.
template <typename Scalar>
ValidationReport validate_scenario(const ShutdownScenario<Scalar>& scenario,
                                   const std::optional<Scalar>& gamma = std::nullopt);

/// Recurrent states of S_reach that are almost-surely reachable from s_new.
template <typename Scalar>
std::vector<int> reachable_recurrent_states(const ShutdownScenario<Scalar>& scenario);

/// gamma* for every reachable recurrent state, ascending by state.
template <typename Scalar>
std::vector<GammaThreshold> gamma_thresholds(const ShutdownScenario<Scalar>& scenario);

/// S^gamma_rec: reachable recurrent states whose visit count from s_new under
/// the canonical reach-and-revisit policy exceeds 1 at this gamma.  Since the
/// count is increasing in gamma, that is exactly gamma > gamma*; in exact mode
/// the test is decided without rounding.
template <typename Scalar>
std::vector<int> qualifying_recurrent_states(const ShutdownScenario<Scalar>& scenario, const Scalar& gamma);

/// One transposition (s_term <-> s_rec) per qualifying recurrent state.
struct SwapFamily {
    std::vector<Permutation> swaps;
    std::vector<int> partners;
    std::string warning;

    std::size_t n() const { return swaps.size(); }
    /// n / (n + 1); zero for an empty family.
    double guaranteed_fraction() const { return static_cast<double>(n()) / static_cast<double>(n() + 1); }
};

template <typename Scalar>
SwapFamily retargeting_swaps(const ShutdownScenario<Scalar>& scenario, const Scalar& gamma);

template <typename Scalar>
struct PropRecRecord {
    int s_rec = -1;
    Scalar gamma{};
    Scalar visit_count{};
    /// Shutdown is the only greedy action at s_new (strict choice).
    bool hypothesis = false;
    /// Shutdown is greedy but tied with an A1 action; logged, not judged.
    bool tie_case = false;
    bool reward_gap = false;       // r(s_term) > r(s_rec)
    bool swapped_avoids = false;   // shutdown not greedy after the swap
    /// The return of the reach-and-revisit policy exceeds gamma r(s_rec) V,
    /// i.e. other states contribute reward.
    bool proof_bound_strict = false;
    Scalar q_shutdown{};
    Scalar q_best_other{};
    Scalar q_swapped_shutdown{};
    Scalar q_swapped_best_other{};

    bool violation() const { return hypothesis && !(reward_gap && swapped_avoids); }
};

/// Checks the swap argument on one reward vector with exact optimal values.
/// Throws InvalidArgument if s_rec is not a reachable recurrent state or
/// gamma <= gamma*(s_rec).
template <typename Scalar>
PropRecRecord<Scalar> verify_prop_rec(const ShutdownScenario<Scalar>& scenario, const Vector<Scalar>& theta,
                                      int s_rec, const Scalar& gamma);

/// Membership in the training-compatible set plus the s_new preference,
/// sharing one optimal-Q solve in q-optimal mode.
template <typename Scalar>
Evaluator<Scalar> goal_set_evaluator(const ShutdownScenario<Scalar>& scenario, GoalSetMode mode,
                                     const Scalar& gamma);

template <typename Scalar>
struct GoalOrbitStats {
    Vector<Scalar> theta;
    Preference own_label = Preference::Tie;
    std::size_t orbit_size = 0;
    std::size_t a1 = 0;
    std::size_t a0 = 0;
    std::size_t ties = 0;
    bool majority = false;
    bool approximate = false;
    std::optional<bool> certified;  // absent when certification was skipped
    std::optional<Counterexample<Scalar>> counterexample;
};

struct StatsOptions {
    GoalSetMode mode = GoalSetMode::QOptimal;
    std::size_t sampled_draws = 5040;  // used only above the enumeration cap
    std::uint64_t seed = 0;
    bool certify = true;
};

template <typename Scalar>
struct ShutdownStats {
    Scalar gamma{};
    std::size_t n = 0;
    double guaranteed_fraction = 0.0;
    double empirical_a1_fraction = 0.0;
    double orbit_pass_rate = 0.0;
    double certified_fraction = 0.0;
    bool approximate = false;
    bool vacuous = true;
    std::vector<GoalOrbitStats<Scalar>> goals;
};

/// Orbit statistics over sampled training-compatible goals: per goal the
/// preference counts at s_new inside the goal set, the majority check with
/// the swap family's n, and (optionally) the retargetability certificate.
template <typename Scalar>
ShutdownStats<Scalar> avoid_shutdown_stats(const ShutdownScenario<Scalar>& scenario,
                                           const std::vector<Vector<Scalar>>& goals, const Scalar& gamma,
                                           const StatsOptions& options = {});

}  // namespace powerseek
