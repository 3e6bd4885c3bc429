#pragma once

#include "powerseek/mdp.hpp"

#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace powerseek {

struct TrainingPair {
    int state = 0;
    int action = 0;
};

/// State-action pairs the trained agent was observed taking.  May be empty,
/// in which case every reward vector is training-compatible.
class TrainingRecord {
   public:
    TrainingRecord() = default;
    /// Throws InvalidArgument when a state appears twice.
    explicit TrainingRecord(std::vector<TrainingPair> pairs);

    const std::vector<TrainingPair>& pairs() const { return pairs_; }
    std::vector<int> states() const;
    bool contains(int state) const;
    bool empty() const { return pairs_.empty(); }

    template <typename Scalar>
    void validate(const TabularMdp<Scalar>& mdp) const;

   private:
    std::vector<TrainingPair> pairs_;
};

/// S_train / S_ood split, and the states reachable from the new state.
struct StatePartition {
    std::vector<int> train;
    std::vector<int> ood;
    std::vector<int> reach;  // contains s_new only if it can be re-entered
};

/// How "the trained action is best" is read: by immediate expected reward of
/// the next state, or by optimal discounted return.
enum class GoalSetMode { Myopic, QOptimal };

std::string_view to_string(GoalSetMode mode);
GoalSetMode parse_goal_set_mode(std::string_view text);

class SamplingError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Membership in the training-compatible goal set.  Ties admit membership.
template <typename Scalar>
bool in_goal_set(const Vector<Scalar>& theta, const TabularMdp<Scalar>& mdp, const TrainingRecord& training,
                 GoalSetMode mode, const Scalar& gamma);

/// Q-optimal membership against an already computed optimal Q table.
template <typename Scalar>
bool in_goal_set(const QTable<Scalar>& q, const TrainingRecord& training);

template <typename Scalar>
struct GoalSample {
    std::vector<Vector<Scalar>> goals;
    std::uint64_t seed = 0;
    GoalSetMode mode = GoalSetMode::QOptimal;
    Scalar r_max{};
    Scalar gamma{};
    std::size_t attempts = 0;

    double acceptance_rate() const {
        return attempts == 0 ? 0.0 : static_cast<double>(goals.size()) / static_cast<double>(attempts);
    }
};

inline constexpr std::size_t kDefaultAttemptCap = 10'000'000;

/// Rejection sampling from the box [0, r_max]^d.  Attempt i draws from
/// stream i of `seed`, so results do not depend on batching.  Stops at
/// `count` acceptances or `attempt_cap` attempts; throws SamplingError when
/// the cap is hit with nothing accepted.
template <typename Scalar>
GoalSample<Scalar> sample_goal_set(const TabularMdp<Scalar>& mdp, const TrainingRecord& training, const Scalar& r_max,
                                   std::size_t count, std::uint64_t seed, GoalSetMode mode, const Scalar& gamma,
                                   std::size_t attempt_cap = kDefaultAttemptCap);

/// Throws InvalidArgument when s_new was visited in training.
template <typename Scalar>
StatePartition partition_states(const TabularMdp<Scalar>& mdp, const TrainingRecord& training, int s_new);

/// Out-of-distribution states reachable from some training state.  Their
/// rewards can move optimal training actions, so permuting them is not
/// guaranteed to stay inside the q-optimal goal set.  Empty means closure holds.
template <typename Scalar>
std::vector<int> closure_violations(const TabularMdp<Scalar>& mdp, const TrainingRecord& training);

}  // namespace powerseek
