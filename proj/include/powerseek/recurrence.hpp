#pragma once

#include "powerseek/mdp.hpp"

#include <map>
#include <optional>
#include <vector>

namespace powerseek {

/// A maximal end component: states plus, per state, the actions that keep
/// the process inside the component with probability 1.
struct EndComponent {
    std::vector<int> states;
    std::vector<std::vector<int>> actions;  // parallel to `states`
};

/// Maximal end components by iterated SCC pruning.  Terminal states and
/// actions with any terminal successor never belong to a component.
/// Components are ordered by their smallest state.
template <typename Scalar>
std::vector<EndComponent> maximal_end_components(const TabularMdp<Scalar>& mdp);

struct RecurrenceReport {
    std::vector<int> recurrent;             // ascending
    std::vector<int> component;             // per state: index into components, or -1
    std::vector<EndComponent> components;
    std::map<int, Policy> witness;          // revisiting policy per recurrent state

    bool is_recurrent(int state) const { return component.at(state) >= 0; }
};

/// States that some stationary policy makes recurrent, each with a witness
/// revisiting policy whose return probability is exactly one.
template <typename Scalar>
RecurrenceReport recurrent_states(const TabularMdp<Scalar>& mdp);

/// Largest set from which `target` can be reached with probability 1.
template <typename Scalar>
std::vector<bool> almost_sure_region(const TabularMdp<Scalar>& mdp, int target);

/// Minimum-expected-hitting-time policy that reaches `target` from `from`
/// with probability 1, or nullopt if no policy does.
template <typename Scalar>
std::optional<Policy> almost_sure_reach_policy(const TabularMdp<Scalar>& mdp, int from, int target);

/// Revisiting policy for a recurrent state: inside its end component it
/// minimises expected return time; elsewhere it plays action 0.
template <typename Scalar>
Policy revisiting_policy(const TabularMdp<Scalar>& mdp, int state);

struct ReachAndRevisit {
    Policy policy;
    Policy revisiting;
    std::optional<Policy> reaching;        // absent when no splice was needed
    std::vector<bool> reaching_region;     // where `revisiting` hits the state a.s.
    bool spliced = false;
};

/// Splices the revisiting policy (on its reaching region) with the reaching
/// policy (everywhere else).  Throws InvalidArgument when `s_rec` is not
/// recurrent or not almost-surely reachable from `s_new`.
template <typename Scalar>
ReachAndRevisit reach_and_revisit_construction(const TabularMdp<Scalar>& mdp, int s_new, int s_rec);

template <typename Scalar>
Policy reach_and_revisit(const TabularMdp<Scalar>& mdp, int s_new, int s_rec) {
    return reach_and_revisit_construction(mdp, s_new, s_rec).policy;
}

struct GammaThreshold {
    int state = -1;
    double gamma_star = 0.0;
    Policy policy;
};

/// Smallest discount beyond which the visit count of `s_rec` from `s_new`
/// under the canonical reach-and-revisit policy exceeds 1, to 1e-12.
/// The returned value always satisfies visit_count(gamma_star) <= 1 unless
/// it is 0.
template <typename Scalar>
GammaThreshold gamma_star(const TabularMdp<Scalar>& mdp, int s_new, int s_rec);

}  // namespace powerseek
