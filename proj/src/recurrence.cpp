#include "powerseek/recurrence.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace powerseek {

namespace {

// Tarjan over the graph induced by `allowed` actions among `active` states.
template <typename Scalar>
std::vector<int> strongly_connected(const TabularMdp<Scalar>& mdp, const std::vector<bool>& active,
                                    const std::vector<std::vector<int>>& allowed) {
    const int d = mdp.state_count();
    std::vector<int> index(d, -1), low(d, 0), component(d, -1);
    std::vector<bool> on_stack(d, false);
    std::vector<int> stack;
    int counter = 0, components = 0;

    std::function<void(int)> visit = [&](int v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
        for (int a : allowed[v]) {
            for (const auto& o : mdp.outcomes(v, a)) {
                const int w = o.next;
                if (!active[w] || !(o.prob > 0)) continue;
                if (index[w] < 0) {
                    visit(w);
                    low[v] = std::min(low[v], low[w]);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
            }
        }
        if (low[v] == index[v]) {
            while (true) {
                int w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                component[w] = components;
                if (w == v) break;
            }
            ++components;
        }
    };
    for (int s = 0; s < d; ++s) {
        if (active[s] && index[s] < 0) visit(s);
    }
    return component;
}

template <typename Scalar>
bool is_one(const Scalar& x) {
    if constexpr (ScalarTraits<Scalar>::exact) {
        return x == 1;
    } else {
        return x >= 1 - 1e-12;
    }
}

template <typename Scalar>
struct PathPolicy {
    Policy policy;
    Vector<Scalar> steps;  // expected hitting time per state, 0 off-region
};

// Minimum expected hitting time of `target` restricted to `allowed` actions
// on `region`.  Every allowed action must keep the process inside `region`
// and `target` must be almost-surely reachable from every region state.
// Starts from an attractor (proper) policy and runs policy iteration.
template <typename Scalar>
PathPolicy<Scalar> shortest_expected_path(const TabularMdp<Scalar>& mdp, int target, const std::vector<bool>& region,
                                          const std::vector<std::vector<int>>& allowed) {
    const int d = mdp.state_count();
    Policy policy(d, 0);
    std::vector<bool> ranked(d, false);
    ranked[target] = true;
    bool progress = true;
    while (progress) {
        progress = false;
        std::vector<bool> next = ranked;
        for (int s = 0; s < d; ++s) {
            if (!region[s] || ranked[s]) continue;
            for (int a : allowed[s]) {
                bool hits = false;
                for (const auto& o : mdp.outcomes(s, a)) {
                    if (o.prob > 0 && ranked[o.next]) hits = true;
                }
                if (hits) {
                    policy[s] = a;
                    next[s] = true;
                    progress = true;
                    break;
                }
            }
        }
        ranked = std::move(next);
    }

    std::vector<int> index(d, -1);
    std::vector<int> members;
    for (int s = 0; s < d; ++s) {
        if (region[s] && s != target) {
            if (!ranked[s]) throw NumericError("shortest_expected_path: region state cannot reach target");
            index[s] = static_cast<int>(members.size());
            members.push_back(s);
        }
    }
    const int n = static_cast<int>(members.size());
    PathPolicy<Scalar> out{policy, Vector<Scalar>::Zero(d)};
    if (n == 0) return out;

    while (true) {
        Matrix<Scalar> a = Matrix<Scalar>::Identity(n, n);
        Vector<Scalar> rhs = Vector<Scalar>::Ones(n);
        for (int i = 0; i < n; ++i) {
            for (const auto& o : mdp.outcomes(members[i], policy[members[i]])) {
                if (index[o.next] >= 0) a(i, index[o.next]) -= o.prob;
            }
        }
        const Vector<Scalar> steps = solve_linear<Scalar>(a, rhs);
        auto cost = [&](int s, int act) {
            Scalar c(1);
            for (const auto& o : mdp.outcomes(s, act)) {
                if (index[o.next] >= 0) c += o.prob * steps(index[o.next]);
            }
            return c;
        };
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            const int s = members[i];
            int best = policy[s];
            Scalar best_cost = cost(s, best);
            for (int act : allowed[s]) {
                Scalar c = cost(s, act);
                bool better;
                if constexpr (ScalarTraits<Scalar>::exact) {
                    better = c < best_cost;
                } else {
                    better = c < best_cost - 1e-12;
                }
                if (better) {
                    best = act;
                    best_cost = c;
                }
            }
            if (best != policy[s]) {
                policy[s] = best;
                changed = true;
            }
        }
        if (!changed) {
            for (int i = 0; i < n; ++i) out.steps(members[i]) = steps(i);
            break;
        }
    }
    out.policy = std::move(policy);
    return out;
}

}  // namespace

template <typename Scalar>
std::vector<EndComponent> maximal_end_components(const TabularMdp<Scalar>& mdp) {
    const int d = mdp.state_count();
    std::vector<bool> active(d, false);
    std::vector<std::vector<int>> allowed(d);
    for (int s = 0; s < d; ++s) {
        if (mdp.is_terminal(s)) continue;
        for (int a = 0; a < mdp.action_count(s); ++a) {
            bool leaves = false;
            for (const auto& o : mdp.outcomes(s, a)) {
                if (o.prob > 0 && mdp.is_terminal(o.next)) leaves = true;
            }
            if (!leaves) allowed[s].push_back(a);
        }
        active[s] = !allowed[s].empty();
    }

    std::vector<int> component;
    while (true) {
        component = strongly_connected(mdp, active, allowed);
        bool changed = false;
        for (int s = 0; s < d; ++s) {
            if (!active[s]) continue;
            std::vector<int> kept;
            for (int a : allowed[s]) {
                bool stays = true;
                for (const auto& o : mdp.outcomes(s, a)) {
                    if (o.prob > 0 && (!active[o.next] || component[o.next] != component[s])) stays = false;
                }
                if (stays) kept.push_back(a);
            }
            if (kept.size() != allowed[s].size()) {
                allowed[s] = std::move(kept);
                changed = true;
            }
        }
        for (int s = 0; s < d; ++s) {
            if (active[s] && allowed[s].empty()) {
                active[s] = false;
                changed = true;
            }
        }
        if (!changed) break;
    }

    std::vector<EndComponent> out;
    std::vector<int> remap(d, -1);
    for (int s = 0; s < d; ++s) {
        if (!active[s]) continue;
        int& slot = remap[component[s]];
        if (slot < 0) {
            slot = static_cast<int>(out.size());
            out.emplace_back();
        }
        out[slot].states.push_back(s);
        out[slot].actions.push_back(allowed[s]);
    }
    return out;
}

template <typename Scalar>
RecurrenceReport recurrent_states(const TabularMdp<Scalar>& mdp) {
    RecurrenceReport report;
    report.components = maximal_end_components(mdp);
    report.component.assign(mdp.state_count(), -1);
    for (std::size_t c = 0; c < report.components.size(); ++c) {
        for (int s : report.components[c].states) report.component[s] = static_cast<int>(c);
    }
    for (int s = 0; s < mdp.state_count(); ++s) {
        if (report.component[s] < 0) continue;
        report.recurrent.push_back(s);
        Policy witness = revisiting_policy(mdp, s);
        if (!is_one(return_probability(mdp, witness, s))) {
            throw NumericError("recurrent_states: witness for " + mdp.state_name(s) + " does not return surely");
        }
        report.witness.emplace(s, std::move(witness));
    }
    return report;
}

template <typename Scalar>
std::vector<bool> almost_sure_region(const TabularMdp<Scalar>& mdp, int target) {
    const int d = mdp.state_count();
    if (target < 0 || target >= d) throw InvalidArgument("almost_sure_region: target out of range");
    std::vector<bool> region(d, true);
    while (true) {
        std::vector<std::vector<int>> predecessors(d);
        for (int s = 0; s < d; ++s) {
            if (!region[s] || s == target || mdp.is_terminal(s)) continue;
            for (int a = 0; a < mdp.action_count(s); ++a) {
                bool inside = true;
                for (const auto& o : mdp.outcomes(s, a)) {
                    if (o.prob > 0 && !region[o.next]) inside = false;
                }
                if (!inside) continue;
                for (const auto& o : mdp.outcomes(s, a)) {
                    if (o.prob > 0) predecessors[o.next].push_back(s);
                }
            }
        }
        std::vector<bool> reach(d, false);
        reach[target] = true;
        std::deque<int> frontier{target};
        while (!frontier.empty()) {
            int s = frontier.front();
            frontier.pop_front();
            for (int p : predecessors[s]) {
                if (!reach[p]) {
                    reach[p] = true;
                    frontier.push_back(p);
                }
            }
        }
        if (reach == region) return region;
        region = std::move(reach);
    }
}

template <typename Scalar>
std::optional<Policy> almost_sure_reach_policy(const TabularMdp<Scalar>& mdp, int from, int target) {
    const int d = mdp.state_count();
    if (from < 0 || from >= d || target < 0 || target >= d) {
        throw InvalidArgument("almost_sure_reach_policy: state out of range");
    }
    if (from == target) return Policy(d, 0);
    const std::vector<bool> region = almost_sure_region(mdp, target);
    if (!region[from]) return std::nullopt;

    std::vector<std::vector<int>> allowed(d);
    for (int s = 0; s < d; ++s) {
        if (!region[s] || s == target) continue;
        for (int a = 0; a < mdp.action_count(s); ++a) {
            bool inside = true;
            for (const auto& o : mdp.outcomes(s, a)) {
                if (o.prob > 0 && !region[o.next]) inside = false;
            }
            if (inside) allowed[s].push_back(a);
        }
    }
    Policy policy = shortest_expected_path(mdp, target, region, allowed).policy;
    if (!is_one(reach_probabilities(mdp, policy, target)(from))) {
        throw NumericError("almost_sure_reach_policy: constructed policy misses target");
    }
    return policy;
}

template <typename Scalar>
Policy revisiting_policy(const TabularMdp<Scalar>& mdp, int state) {
    const int d = mdp.state_count();
    if (state < 0 || state >= d) throw InvalidArgument("revisiting_policy: state out of range");
    const auto components = maximal_end_components(mdp);
    for (const auto& component : components) {
        auto it = std::find(component.states.begin(), component.states.end(), state);
        if (it == component.states.end()) continue;

        std::vector<bool> region(d, false);
        std::vector<std::vector<int>> allowed(d);
        for (std::size_t i = 0; i < component.states.size(); ++i) {
            region[component.states[i]] = true;
            allowed[component.states[i]] = component.actions[i];
        }
        const PathPolicy<Scalar> path = shortest_expected_path(mdp, state, region, allowed);
        Policy policy = path.policy;

        // At the state itself: the component action with the smallest
        // expected return time.
        const auto& own = component.actions[static_cast<std::size_t>(it - component.states.begin())];
        int best = own.front();
        Scalar best_time(0);
        for (std::size_t k = 0; k < own.size(); ++k) {
            Scalar t(1);
            for (const auto& o : mdp.outcomes(state, own[k])) {
                if (o.next != state) t += o.prob * path.steps(o.next);
            }
            if (k == 0 || t < best_time) {
                best = own[k];
                best_time = t;
            }
        }
        policy[state] = best;
        return policy;
    }
    throw InvalidArgument("state " + mdp.state_name(state) + " is not recurrent");
}

template <typename Scalar>
ReachAndRevisit reach_and_revisit_construction(const TabularMdp<Scalar>& mdp, int s_new, int s_rec) {
    const int d = mdp.state_count();
    if (s_new < 0 || s_new >= d || s_rec < 0 || s_rec >= d) {
        throw InvalidArgument("reach_and_revisit: state out of range");
    }
    ReachAndRevisit out;
    out.revisiting = revisiting_policy(mdp, s_rec);

    const Vector<Scalar> reach = reach_probabilities(mdp, out.revisiting, s_rec);
    out.reaching_region.assign(d, false);
    for (int s = 0; s < d; ++s) out.reaching_region[s] = is_one(reach(s));

    if (out.reaching_region[s_new]) {
        out.policy = out.revisiting;
    } else {
        out.reaching = almost_sure_reach_policy(mdp, s_new, s_rec);
        if (!out.reaching) {
            throw InvalidArgument("state " + mdp.state_name(s_rec) + " is not almost surely reachable from " +
                                  mdp.state_name(s_new));
        }
        out.policy.resize(d);
        for (int s = 0; s < d; ++s) out.policy[s] = out.reaching_region[s] ? out.revisiting[s] : (*out.reaching)[s];
        out.spliced = true;
    }

    if (!is_one(reach_probabilities(mdp, out.policy, s_rec)(s_new)) ||
        !is_one(return_probability(mdp, out.policy, s_rec))) {
        throw NumericError("reach_and_revisit: spliced policy lost a probability-one guarantee");
    }
    return out;
}

template <typename Scalar>
GammaThreshold gamma_star(const TabularMdp<Scalar>& mdp, int s_new, int s_rec) {
    GammaThreshold result;
    result.state = s_rec;
    result.policy = reach_and_revisit(mdp, s_new, s_rec);

    // At gamma = 0 only the first step counts: V(0) = P(s_1 = s_rec).  When
    // that is already 1, every later (almost sure) revisit pushes V above 1.
    const Scalar at_zero = visit_count(mdp, result.policy, s_new, s_rec, Scalar(0));
    if (is_one(at_zero)) {
        result.gamma_star = 0.0;
        return result;
    }

    const TabularMdp<double> approx = mdp.template cast<double>();
    auto excess = [&](double g) { return visit_count(approx, result.policy, s_new, s_rec, g) - 1.0; };

    double lo = 0.0;
    double hi = 0.5;
    while (excess(hi) <= 0.0) {
        lo = hi;
        hi = 1.0 - (1.0 - hi) / 2.0;
        if (1.0 - hi < 1e-9) {
            throw NumericError("gamma_star: visit count of " + mdp.state_name(s_rec) + " never exceeds 1 below 1 - 1e-9");
        }
    }
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (excess(mid) > 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    result.gamma_star = lo;
    return result;
}

#define POWERSEEK_INSTANTIATE(S)                                                                          \
    template std::vector<EndComponent> maximal_end_components<S>(const TabularMdp<S>&);                   \
    template RecurrenceReport recurrent_states<S>(const TabularMdp<S>&);                                  \
    template std::vector<bool> almost_sure_region<S>(const TabularMdp<S>&, int);                          \
    template std::optional<Policy> almost_sure_reach_policy<S>(const TabularMdp<S>&, int, int);           \
    template Policy revisiting_policy<S>(const TabularMdp<S>&, int);                                      \
    template ReachAndRevisit reach_and_revisit_construction<S>(const TabularMdp<S>&, int, int);           \
    template GammaThreshold gamma_star<S>(const TabularMdp<S>&, int, int);

POWERSEEK_INSTANTIATE(double)
POWERSEEK_INSTANTIATE(Rational)

#undef POWERSEEK_INSTANTIATE

}  // namespace powerseek
