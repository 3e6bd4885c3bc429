#pragma once

#include "powerseek/numeric.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace powerseek {

template <typename Scalar>
struct Outcome {
    int next = 0;
    Scalar prob{};
};

/// Finite MDP with per-state action lists and sparse transition rows.
///
/// Terminal states carry exactly one action ("stay") looping to themselves
/// with probability 1.  Their reward is collected once on arrival and their
/// continuation value is zero; every routine in this header honours that.
template <typename Scalar>
class TabularMdp {
   public:
    using scalar_type = Scalar;

    TabularMdp() = default;
    explicit TabularMdp(int state_count);

    int state_count() const { return static_cast<int>(actions_.size()); }
    int action_count(int state) const { return static_cast<int>(actions_.at(state).size()); }

    /// Appends an action and returns its index.  Outcomes with equal `next`
    /// are merged.  Throws InvalidArgument on bad indices or terminal states.
    int add_action(int state, std::vector<Outcome<Scalar>> outcomes, std::string name = {});

    /// Replaces the state's actions with the absorbing "stay" loop.
    void set_terminal(int state);

    bool is_terminal(int state) const { return terminal_.at(state); }
    const std::vector<Outcome<Scalar>>& outcomes(int state, int action) const {
        return actions_.at(state).at(action).outcomes;
    }
    const std::string& action_name(int state, int action) const { return actions_.at(state).at(action).name; }
    std::optional<int> find_action(int state, std::string_view name) const;

    const std::string& state_name(int state) const { return names_.at(state); }
    void set_state_name(int state, std::string name);
    std::optional<int> find_state(std::string_view name) const;

    /// Checks every structural invariant: ≥1 action per state, rows summing
    /// to one (exactly, or within 1e-12 for double), nonnegative
    /// probabilities, absorbing terminal encoding.  Throws InvalidArgument.
    void validate() const;

    template <typename Other>
    TabularMdp<Other> cast() const;

   private:
    template <typename>
    friend class TabularMdp;

    struct Action {
        std::vector<Outcome<Scalar>> outcomes;
        std::string name;
    };
    std::vector<std::vector<Action>> actions_;
    std::vector<bool> terminal_;
    std::vector<std::string> names_;
};

/// Deterministic stationary policy: one action index per state.
using Policy = std::vector<int>;

/// Optimal action values together with the discount they were computed under.
template <typename Scalar>
struct QTable {
    std::vector<std::vector<Scalar>> values;
    Scalar gamma{};

    const Scalar& operator()(int state, int action) const { return values.at(state).at(action); }
    int state_count() const { return static_cast<int>(values.size()); }
    Scalar max_value(int state) const;
};

/// Throws InvalidArgument unless `theta` has one nonnegative entry per state.
template <typename Scalar>
void check_reward(const TabularMdp<Scalar>& mdp, const Vector<Scalar>& theta);

/// Throws InvalidArgument unless 0 <= gamma < 1.
template <typename Scalar>
void check_discount(const Scalar& gamma);

void check_policy(int state_count, const std::vector<int>& action_counts, const Policy& policy);

template <typename Scalar>
void check_policy(const TabularMdp<Scalar>& mdp, const Policy& policy);

/// Fixed point of Q(s,a) = sum_s' P(s'|s,a) * gamma * (r(s') + V(s')),
/// V = max_a Q except V(terminal) = 0.  Rational: policy iteration, exact.
/// double: value iteration until the sup-norm change is below 1e-12.
template <typename Scalar>
QTable<Scalar> optimal_q(const TabularMdp<Scalar>& mdp, const Vector<Scalar>& theta, const Scalar& gamma);

/// Actions within the tie band of the best value (exact ties for rationals).
template <typename Scalar>
std::vector<int> greedy_actions(const QTable<Scalar>& q, int state);

template <typename Scalar>
std::vector<int> greedy_actions(const QTable<Scalar>& q, int state, const Scalar& tolerance);

/// Lowest-index greedy action per state.
template <typename Scalar>
Policy greedy_policy(const QTable<Scalar>& q);

/// Per-state discounted return of a fixed policy, by direct linear solve.
template <typename Scalar>
Vector<Scalar> evaluate_policy(const TabularMdp<Scalar>& mdp, const Vector<Scalar>& theta, const Policy& policy,
                               const Scalar& gamma);

/// Expected discounted visits to `target`, first step undiscounted:
/// N(s) = sum_s' P(s'|s,pi(s)) (1[s' = target] + gamma N(s')), N(terminal) = 0.
/// Returns N for every start state.
template <typename Scalar>
Vector<Scalar> visit_counts(const TabularMdp<Scalar>& mdp, const Policy& policy, int target, const Scalar& gamma);

template <typename Scalar>
Scalar visit_count(const TabularMdp<Scalar>& mdp, const Policy& policy, int start, int target, const Scalar& gamma);

/// Probability of ever reaching `target` (time 0 included) from each state.
template <typename Scalar>
Vector<Scalar> reach_probabilities(const TabularMdp<Scalar>& mdp, const Policy& policy, int target);

/// Probability of returning to `state` after leaving it (time >= 1).
template <typename Scalar>
Scalar return_probability(const TabularMdp<Scalar>& mdp, const Policy& policy, int state);

/// Largest absolute change one Bellman backup makes to `q`.
template <typename Scalar>
Scalar bellman_residual(const TabularMdp<Scalar>& mdp, const Vector<Scalar>& theta, const QTable<Scalar>& q);

/// States reachable with positive probability under some policy.
template <typename Scalar>
std::vector<bool> reachable_from(const TabularMdp<Scalar>& mdp, const std::vector<int>& sources);

/// Relabels states: state s of the input becomes state perm[s] of the output.
template <typename Scalar>
TabularMdp<Scalar> permute_states(const TabularMdp<Scalar>& mdp, const std::vector<int>& perm);

// --- template definitions -------------------------------------------------

template <typename Scalar>
template <typename Other>
TabularMdp<Other> TabularMdp<Scalar>::cast() const {
    TabularMdp<Other> out;
    out.terminal_ = terminal_;
    out.names_ = names_;
    out.actions_.resize(actions_.size());
    for (std::size_t s = 0; s < actions_.size(); ++s) {
        for (const auto& action : actions_[s]) {
            typename TabularMdp<Other>::Action converted;
            converted.name = action.name;
            for (const auto& o : action.outcomes) {
                if constexpr (std::is_same_v<Other, Scalar>) {
                    converted.outcomes.push_back({o.next, o.prob});
                } else if constexpr (std::is_same_v<Other, double>) {
                    converted.outcomes.push_back({o.next, to_double(o.prob)});
                } else {
                    converted.outcomes.push_back({o.next, rational_from_double(o.prob)});
                }
            }
            out.actions_[s].push_back(std::move(converted));
        }
    }
    return out;
}

}  // namespace powerseek
