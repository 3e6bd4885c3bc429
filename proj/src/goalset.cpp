#include "powerseek/goalset.hpp"

#include "powerseek/random.hpp"

#include <algorithm>
#include <string>

namespace powerseek {

TrainingRecord::TrainingRecord(std::vector<TrainingPair> pairs) : pairs_(std::move(pairs)) {
    std::vector<int> seen;
    for (const auto& p : pairs_) {
        if (std::find(seen.begin(), seen.end(), p.state) != seen.end()) {
            throw InvalidArgument("training record lists state " + std::to_string(p.state) + " twice");
        }
        seen.push_back(p.state);
    }
}

std::vector<int> TrainingRecord::states() const {
    std::vector<int> out;
    for (const auto& p : pairs_) out.push_back(p.state);
    std::sort(out.begin(), out.end());
    return out;
}

bool TrainingRecord::contains(int state) const {
    return std::any_of(pairs_.begin(), pairs_.end(), [&](const TrainingPair& p) { return p.state == state; });
}

template <typename Scalar>
void TrainingRecord::validate(const TabularMdp<Scalar>& mdp) const {
    for (const auto& p : pairs_) {
        if (p.state < 0 || p.state >= mdp.state_count()) throw InvalidArgument("training pair: state out of range");
        if (p.action < 0 || p.action >= mdp.action_count(p.state)) {
            throw InvalidArgument("training pair: invalid action at state " + mdp.state_name(p.state));
        }
    }
}

std::string_view to_string(GoalSetMode mode) { return mode == GoalSetMode::Myopic ? "myopic" : "q-optimal"; }

GoalSetMode parse_goal_set_mode(std::string_view text) {
    if (text == "myopic") return GoalSetMode::Myopic;
    if (text == "q-optimal") return GoalSetMode::QOptimal;
    throw InvalidArgument("unknown goal-set mode \"" + std::string(text) + "\" (expected myopic or q-optimal)");
}

namespace {

template <typename Scalar>
bool myopic_compatible(const Vector<Scalar>& theta, const TabularMdp<Scalar>& mdp, const TrainingRecord& training) {
    const Scalar tolerance = ScalarTraits<Scalar>::tie_tolerance();
    auto expected = [&](int s, int a) {
        Scalar acc(0);
        for (const auto& o : mdp.outcomes(s, a)) acc += o.prob * theta(o.next);
        return acc;
    };
    for (const auto& p : training.pairs()) {
        const Scalar chosen = expected(p.state, p.action);
        for (int a = 0; a < mdp.action_count(p.state); ++a) {
            if (chosen < expected(p.state, a) - tolerance) return false;
        }
    }
    return true;
}

}  // namespace

template <typename Scalar>
bool in_goal_set(const QTable<Scalar>& q, const TrainingRecord& training) {
    for (const auto& p : training.pairs()) {
        const auto greedy = greedy_actions(q, p.state);
        if (std::find(greedy.begin(), greedy.end(), p.action) == greedy.end()) return false;
    }
    return true;
}

template <typename Scalar>
bool in_goal_set(const Vector<Scalar>& theta, const TabularMdp<Scalar>& mdp, const TrainingRecord& training,
                 GoalSetMode mode, const Scalar& gamma) {
    if (theta.size() != mdp.state_count()) throw InvalidArgument("in_goal_set: reward dimension mismatch");
    if (training.empty()) return true;
    if (mode == GoalSetMode::Myopic) return myopic_compatible(theta, mdp, training);
    return in_goal_set(optimal_q(mdp, theta, gamma), training);
}

template <typename Scalar>
GoalSample<Scalar> sample_goal_set(const TabularMdp<Scalar>& mdp, const TrainingRecord& training, const Scalar& r_max,
                                   std::size_t count, std::uint64_t seed, GoalSetMode mode, const Scalar& gamma,
                                   std::size_t attempt_cap) {
    if (!(r_max > 0)) throw InvalidArgument("sample_goal_set: r_max must be positive");
    check_discount(gamma);
    training.validate(mdp);
    GoalSample<Scalar> sample;
    sample.seed = seed;
    sample.mode = mode;
    sample.r_max = r_max;
    sample.gamma = gamma;
    const int d = mdp.state_count();
    while (sample.goals.size() < count && sample.attempts < attempt_cap) {
        SplitMix64 rng(derive_seed(seed, sample.attempts));
        ++sample.attempts;
        Vector<Scalar> theta(d);
        for (int i = 0; i < d; ++i) theta(i) = uniform_scalar(rng, r_max);
        if (in_goal_set(theta, mdp, training, mode, gamma)) sample.goals.push_back(std::move(theta));
    }
    if (sample.goals.empty() && count > 0) {
        throw SamplingError("sample_goal_set: no training-compatible vector in " + std::to_string(sample.attempts) +
                            " attempts; the goal set may have measure close to zero");
    }
    return sample;
}

template <typename Scalar>
StatePartition partition_states(const TabularMdp<Scalar>& mdp, const TrainingRecord& training, int s_new) {
    training.validate(mdp);
    const int d = mdp.state_count();
    if (s_new < 0 || s_new >= d) throw InvalidArgument("partition_states: s_new out of range");
    if (training.contains(s_new)) {
        throw InvalidArgument("s_new (" + mdp.state_name(s_new) + ") was visited in training");
    }
    StatePartition out;
    for (int s = 0; s < d; ++s) (training.contains(s) ? out.train : out.ood).push_back(s);

    std::vector<int> successors;
    for (int a = 0; a < mdp.action_count(s_new); ++a) {
        for (const auto& o : mdp.outcomes(s_new, a)) {
            if (o.prob > 0) successors.push_back(o.next);
        }
    }
    const auto seen = reachable_from(mdp, successors);
    for (int s = 0; s < d; ++s) {
        if (seen[s]) out.reach.push_back(s);
    }
    return out;
}

template <typename Scalar>
std::vector<int> closure_violations(const TabularMdp<Scalar>& mdp, const TrainingRecord& training) {
    const auto seen = reachable_from(mdp, training.states());
    std::vector<int> out;
    for (int s = 0; s < mdp.state_count(); ++s) {
        if (seen[s] && !training.contains(s)) out.push_back(s);
    }
    return out;
}

#define POWERSEEK_INSTANTIATE(S)                                                                                  \
    template void TrainingRecord::validate<S>(const TabularMdp<S>&) const;                                       \
    template bool in_goal_set<S>(const Vector<S>&, const TabularMdp<S>&, const TrainingRecord&, GoalSetMode,      \
                                 const S&);                                                                       \
    template bool in_goal_set<S>(const QTable<S>&, const TrainingRecord&);                                        \
    template GoalSample<S> sample_goal_set<S>(const TabularMdp<S>&, const TrainingRecord&, const S&, std::size_t, \
                                              std::uint64_t, GoalSetMode, const S&, std::size_t);                 \
    template StatePartition partition_states<S>(const TabularMdp<S>&, const TrainingRecord&, int);                \
    template std::vector<int> closure_violations<S>(const TabularMdp<S>&, const TrainingRecord&);

POWERSEEK_INSTANTIATE(double)
POWERSEEK_INSTANTIATE(Rational)

#undef POWERSEEK_INSTANTIATE

}  // namespace powerseek
