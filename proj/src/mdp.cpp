#include "powerseek/mdp.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace powerseek {

template <typename Scalar>
TabularMdp<Scalar>::TabularMdp(int state_count) {
    if (state_count < 1) throw InvalidArgument("TabularMdp: state_count must be positive");
    actions_.resize(state_count);
    terminal_.assign(state_count, false);
    names_.resize(state_count);
    for (int s = 0; s < state_count; ++s) names_[s] = "s" + std::to_string(s);
}

template <typename Scalar>
int TabularMdp<Scalar>::add_action(int state, std::vector<Outcome<Scalar>> outcomes, std::string name) {
    if (state < 0 || state >= state_count()) throw InvalidArgument("add_action: state out of range");
    if (terminal_[state]) throw InvalidArgument("add_action: state " + names_[state] + " is terminal");
    if (outcomes.empty()) throw InvalidArgument("add_action: empty outcome list");
    std::map<int, Scalar> merged;
    for (auto& o : outcomes) {
        if (o.next < 0 || o.next >= state_count()) throw InvalidArgument("add_action: successor out of range");
        auto [it, inserted] = merged.emplace(o.next, o.prob);
        if (!inserted) it->second += o.prob;
    }
    Action action;
    action.name = name.empty() ? "a" + std::to_string(actions_[state].size()) : std::move(name);
    for (auto& [next, prob] : merged) action.outcomes.push_back({next, prob});
    actions_[state].push_back(std::move(action));
    return static_cast<int>(actions_[state].size()) - 1;
}

template <typename Scalar>
void TabularMdp<Scalar>::set_terminal(int state) {
    if (state < 0 || state >= state_count()) throw InvalidArgument("set_terminal: state out of range");
    terminal_[state] = true;
    actions_[state].clear();
    actions_[state].push_back(Action{{{state, Scalar(1)}}, "stay"});
}

template <typename Scalar>
std::optional<int> TabularMdp<Scalar>::find_action(int state, std::string_view name) const {
    const auto& list = actions_.at(state);
    for (std::size_t a = 0; a < list.size(); ++a) {
        if (list[a].name == name) return static_cast<int>(a);
    }
    return std::nullopt;
}

template <typename Scalar>
void TabularMdp<Scalar>::set_state_name(int state, std::string name) {
    names_.at(state) = std::move(name);
}

template <typename Scalar>
std::optional<int> TabularMdp<Scalar>::find_state(std::string_view name) const {
    for (std::size_t s = 0; s < names_.size(); ++s) {
        if (names_[s] == name) return static_cast<int>(s);
    }
    return std::nullopt;
}

template <typename Scalar>
void TabularMdp<Scalar>::validate() const {
    if (actions_.empty()) throw InvalidArgument("mdp has no states");
    for (int s = 0; s < state_count(); ++s) {
        const auto& list = actions_[s];
        if (list.empty()) throw InvalidArgument("state " + names_[s] + " has no actions");
        if (terminal_[s]) {
            if (list.size() != 1 || list[0].outcomes.size() != 1 || list[0].outcomes[0].next != s ||
                !(list[0].outcomes[0].prob == Scalar(1))) {
                throw InvalidArgument("terminal state " + names_[s] + " is not an absorbing self-loop");
            }
            continue;
        }
        for (const auto& action : list) {
            Scalar total(0);
            for (const auto& o : action.outcomes) {
                if (o.prob < 0) {
                    throw InvalidArgument("negative probability in " + names_[s] + "/" + action.name);
                }
                total += o.prob;
            }
            bool ok;
            if constexpr (ScalarTraits<Scalar>::exact) {
                ok = total == 1;
            } else {
                ok = abs_value(Scalar(total - 1)) <= 1e-12;
            }
            if (!ok) throw InvalidArgument("distribution of " + names_[s] + "/" + action.name + " does not sum to 1");
        }
    }
}

template <typename Scalar>
Scalar QTable<Scalar>::max_value(int state) const {
    const auto& row = values.at(state);
    Scalar best = row.at(0);
    for (const auto& v : row) {
        if (best < v) best = v;
    }
    return best;
}

template <typename Scalar>
void check_reward(const TabularMdp<Scalar>& mdp, const Vector<Scalar>& theta) {
    if (theta.size() != mdp.state_count()) {
        throw InvalidArgument("reward vector has " + std::to_string(theta.size()) + " entries, mdp has " +
                              std::to_string(mdp.state_count()) + " states");
    }
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        if (theta(i) < 0) throw InvalidArgument("reward of state " + mdp.state_name(int(i)) + " is negative");
    }
}

template <typename Scalar>
void check_discount(const Scalar& gamma) {
    if (gamma < 0 || !(gamma < 1)) throw InvalidArgument("discount must lie in [0, 1)");
}

void check_policy(int state_count, const std::vector<int>& action_counts, const Policy& policy) {
    if (static_cast<int>(policy.size()) != state_count) throw InvalidArgument("policy length mismatch");
    for (int s = 0; s < state_count; ++s) {
        if (policy[s] < 0 || policy[s] >= action_counts[s]) {
            throw InvalidArgument("policy action out of range at state " + std::to_string(s));
        }
    }
}

template <typename Scalar>
void check_policy(const TabularMdp<Scalar>& mdp, const Policy& policy) {
    std::vector<int> counts(mdp.state_count());
    for (int s = 0; s < mdp.state_count(); ++s) counts[s] = mdp.action_count(s);
    check_policy(mdp.state_count(), counts, policy);
}

namespace {

template <typename Scalar>
std::vector<std::vector<Scalar>> backup(const TabularMdp<Scalar>& mdp, const Vector<Scalar>& theta,
                                        const Vector<Scalar>& value, const Scalar& gamma) {
    std::vector<std::vector<Scalar>> q(mdp.state_count());
    for (int s = 0; s < mdp.state_count(); ++s) {
        q[s].assign(mdp.action_count(s), Scalar(0));
        if (mdp.is_terminal(s)) continue;
        for (int a = 0; a < mdp.action_count(s); ++a) {
            Scalar acc(0);
            for (const auto& o : mdp.outcomes(s, a)) {
                const Scalar cont = mdp.is_terminal(o.next) ? Scalar(0) : value(o.next);
                acc += o.prob * (theta(o.next) + cont);
            }
            q[s][a] = gamma * acc;
        }
    }
    return q;
}

// Solves x = c + gamma * P_pi x on non-terminal states, with x = 0 at terminals.
template <typename Scalar>
Vector<Scalar> solve_discounted(const TabularMdp<Scalar>& mdp, const Policy& policy, const Scalar& gamma,
                                const Vector<Scalar>& c) {
    const int d = mdp.state_count();
    Matrix<Scalar> a = Matrix<Scalar>::Identity(d, d);
    Vector<Scalar> rhs = Vector<Scalar>::Zero(d);
    for (int s = 0; s < d; ++s) {
        if (mdp.is_terminal(s)) continue;
        rhs(s) = c(s);
        for (const auto& o : mdp.outcomes(s, policy[s])) {
            if (mdp.is_terminal(o.next)) continue;
            a(s, o.next) -= gamma * o.prob;
        }
    }
    return solve_linear<Scalar>(a, rhs);
}

}  // namespace

template <typename Scalar>
QTable<Scalar> optimal_q(const TabularMdp<Scalar>& mdp, const Vector<Scalar>& theta, const Scalar& gamma) {
    check_discount(gamma);
    if (theta.size() != mdp.state_count()) throw InvalidArgument("optimal_q: reward dimension mismatch");
    const int d = mdp.state_count();
    QTable<Scalar> result;
    result.gamma = gamma;

    if constexpr (ScalarTraits<Scalar>::exact) {
        Policy policy(d, 0);
        Vector<Scalar> zero = Vector<Scalar>::Zero(d);
        auto q = backup(mdp, theta, zero, gamma);
        for (int s = 0; s < d; ++s) {
            for (int a = 1; a < mdp.action_count(s); ++a) {
                if (q[s][policy[s]] < q[s][a]) policy[s] = a;
            }
        }
        while (true) {
            Vector<Scalar> value = evaluate_policy(mdp, theta, policy, gamma);
            q = backup(mdp, theta, value, gamma);
            bool changed = false;
            for (int s = 0; s < d; ++s) {
                if (mdp.is_terminal(s)) continue;
                int best = policy[s];
                for (int a = 0; a < mdp.action_count(s); ++a) {
                    if (q[s][best] < q[s][a]) best = a;
                }
                if (best != policy[s]) {
                    policy[s] = best;
                    changed = true;
                }
            }
            if (!changed) break;
        }
        result.values = std::move(q);
    } else {
        Vector<Scalar> value = Vector<Scalar>::Zero(d);
        constexpr long kMaxIterations = 50'000'000;
        long iteration = 0;
        while (true) {
            auto q = backup(mdp, theta, value, gamma);
            Scalar delta(0);
            for (int s = 0; s < d; ++s) {
                Scalar v = 0;
                if (!mdp.is_terminal(s)) v = *std::max_element(q[s].begin(), q[s].end());
                delta = std::max(delta, abs_value(Scalar(v - value(s))));
                value(s) = v;
            }
            if (delta <= 1e-12) break;
            if (++iteration > kMaxIterations) throw NumericError("optimal_q: value iteration did not converge");
        }
        result.values = backup(mdp, theta, value, gamma);
    }
    return result;
}

template <typename Scalar>
std::vector<int> greedy_actions(const QTable<Scalar>& q, int state, const Scalar& tolerance) {
    if (state < 0 || state >= q.state_count()) throw InvalidArgument("greedy_actions: state out of range");
    const Scalar best = q.max_value(state);
    std::vector<int> out;
    const auto& row = q.values[state];
    for (std::size_t a = 0; a < row.size(); ++a) {
        if (!(row[a] < best - tolerance)) out.push_back(static_cast<int>(a));
    }
    return out;
}

template <typename Scalar>
std::vector<int> greedy_actions(const QTable<Scalar>& q, int state) {
    return greedy_actions(q, state, ScalarTraits<Scalar>::tie_tolerance());
}

template <typename Scalar>
Policy greedy_policy(const QTable<Scalar>& q) {
    Policy policy(q.state_count());
    for (int s = 0; s < q.state_count(); ++s) policy[s] = greedy_actions(q, s).front();
    return policy;
}

template <typename Scalar>
Vector<Scalar> evaluate_policy(const TabularMdp<Scalar>& mdp, const Vector<Scalar>& theta, const Policy& policy,
                               const Scalar& gamma) {
    check_discount(gamma);
    check_policy(mdp, policy);
    if (theta.size() != mdp.state_count()) throw InvalidArgument("evaluate_policy: reward dimension mismatch");
    const int d = mdp.state_count();
    Vector<Scalar> c = Vector<Scalar>::Zero(d);
    for (int s = 0; s < d; ++s) {
        if (mdp.is_terminal(s)) continue;
        Scalar acc(0);
        for (const auto& o : mdp.outcomes(s, policy[s])) acc += o.prob * theta(o.next);
        c(s) = gamma * acc;
    }
    return solve_discounted(mdp, policy, gamma, c);
}

template <typename Scalar>
Vector<Scalar> visit_counts(const TabularMdp<Scalar>& mdp, const Policy& policy, int target, const Scalar& gamma) {
    check_discount(gamma);
    check_policy(mdp, policy);
    const int d = mdp.state_count();
    if (target < 0 || target >= d) throw InvalidArgument("visit_count: target out of range");
    Vector<Scalar> c = Vector<Scalar>::Zero(d);
    for (int s = 0; s < d; ++s) {
        if (mdp.is_terminal(s)) continue;
        for (const auto& o : mdp.outcomes(s, policy[s])) {
            if (o.next == target) c(s) += o.prob;
        }
    }
    return solve_discounted(mdp, policy, gamma, c);
}

template <typename Scalar>
Scalar visit_count(const TabularMdp<Scalar>& mdp, const Policy& policy, int start, int target, const Scalar& gamma) {
    if (start < 0 || start >= mdp.state_count()) throw InvalidArgument("visit_count: start out of range");
    return visit_counts(mdp, policy, target, gamma)(start);
}

template <typename Scalar>
Vector<Scalar> reach_probabilities(const TabularMdp<Scalar>& mdp, const Policy& policy, int target) {
    check_policy(mdp, policy);
    const int d = mdp.state_count();
    if (target < 0 || target >= d) throw InvalidArgument("reach_probabilities: target out of range");

    // Backward search over the policy's support graph, target absorbing.
    std::vector<std::vector<int>> predecessors(d);
    for (int s = 0; s < d; ++s) {
        if (s == target || mdp.is_terminal(s)) continue;
        for (const auto& o : mdp.outcomes(s, policy[s])) {
            if (o.prob > 0) predecessors[o.next].push_back(s);
        }
    }
    std::vector<bool> can_reach(d, false);
    std::deque<int> frontier{target};
    can_reach[target] = true;
    while (!frontier.empty()) {
        int s = frontier.front();
        frontier.pop_front();
        for (int p : predecessors[s]) {
            if (!can_reach[p]) {
                can_reach[p] = true;
                frontier.push_back(p);
            }
        }
    }

    std::vector<int> index(d, -1);
    std::vector<int> transient;
    for (int s = 0; s < d; ++s) {
        if (can_reach[s] && s != target) {
            index[s] = static_cast<int>(transient.size());
            transient.push_back(s);
        }
    }
    const int n = static_cast<int>(transient.size());
    Matrix<Scalar> a = Matrix<Scalar>::Identity(n, n);
    Vector<Scalar> rhs = Vector<Scalar>::Zero(n);
    for (int i = 0; i < n; ++i) {
        for (const auto& o : mdp.outcomes(transient[i], policy[transient[i]])) {
            if (o.next == target) {
                rhs(i) += o.prob;
            } else if (index[o.next] >= 0) {
                a(i, index[o.next]) -= o.prob;
            }
        }
    }
    Vector<Scalar> x = n > 0 ? solve_linear<Scalar>(a, rhs) : Vector<Scalar>(0);
    Vector<Scalar> out = Vector<Scalar>::Zero(d);
    out(target) = 1;
    for (int i = 0; i < n; ++i) out(transient[i]) = x(i);
    return out;
}

template <typename Scalar>
Scalar return_probability(const TabularMdp<Scalar>& mdp, const Policy& policy, int state) {
    if (state < 0 || state >= mdp.state_count()) throw InvalidArgument("return_probability: state out of range");
    if (mdp.is_terminal(state)) return Scalar(0);
    const Vector<Scalar> reach = reach_probabilities(mdp, policy, state);
    Scalar total(0);
    for (const auto& o : mdp.outcomes(state, policy[state])) total += o.prob * reach(o.next);
    return total;
}

template <typename Scalar>
Scalar bellman_residual(const TabularMdp<Scalar>& mdp, const Vector<Scalar>& theta, const QTable<Scalar>& q) {
    const int d = mdp.state_count();
    Vector<Scalar> value = Vector<Scalar>::Zero(d);
    for (int s = 0; s < d; ++s) {
        if (!mdp.is_terminal(s)) value(s) = q.max_value(s);
    }
    auto next = backup(mdp, theta, value, q.gamma);
    Scalar worst(0);
    for (int s = 0; s < d; ++s) {
        for (int a = 0; a < mdp.action_count(s); ++a) {
            Scalar diff = abs_value(Scalar(next[s][a] - q(s, a)));
            if (worst < diff) worst = diff;
        }
    }
    return worst;
}

template <typename Scalar>
std::vector<bool> reachable_from(const TabularMdp<Scalar>& mdp, const std::vector<int>& sources) {
    std::vector<bool> seen(mdp.state_count(), false);
    std::deque<int> frontier;
    for (int s : sources) {
        if (!seen.at(s)) {
            seen[s] = true;
            frontier.push_back(s);
        }
    }
    while (!frontier.empty()) {
        int s = frontier.front();
        frontier.pop_front();
        for (int a = 0; a < mdp.action_count(s); ++a) {
            for (const auto& o : mdp.outcomes(s, a)) {
                if (o.prob > 0 && !seen[o.next]) {
                    seen[o.next] = true;
                    frontier.push_back(o.next);
                }
            }
        }
    }
    return seen;
}

template <typename Scalar>
TabularMdp<Scalar> permute_states(const TabularMdp<Scalar>& mdp, const std::vector<int>& perm) {
    const int d = mdp.state_count();
    if (static_cast<int>(perm.size()) != d) throw InvalidArgument("permute_states: length mismatch");
    std::vector<int> inverse(d, -1);
    for (int s = 0; s < d; ++s) {
        if (perm[s] < 0 || perm[s] >= d || inverse[perm[s]] != -1) {
            throw InvalidArgument("permute_states: not a bijection");
        }
        inverse[perm[s]] = s;
    }
    TabularMdp<Scalar> out(d);
    for (int t = 0; t < d; ++t) {
        const int s = inverse[t];
        out.set_state_name(t, mdp.state_name(s));
        if (mdp.is_terminal(s)) {
            out.set_terminal(t);
            continue;
        }
        for (int a = 0; a < mdp.action_count(s); ++a) {
            std::vector<Outcome<Scalar>> moved;
            for (const auto& o : mdp.outcomes(s, a)) moved.push_back({perm[o.next], o.prob});
            out.add_action(t, std::move(moved), mdp.action_name(s, a));
        }
    }
    return out;
}

#define POWERSEEK_INSTANTIATE(S)                                                                             \
    template class TabularMdp<S>;                                                                            \
    template struct QTable<S>;                                                                               \
    template void check_reward<S>(const TabularMdp<S>&, const Vector<S>&);                                   \
    template void check_discount<S>(const S&);                                                               \
    template void check_policy<S>(const TabularMdp<S>&, const Policy&);                                      \
    template QTable<S> optimal_q<S>(const TabularMdp<S>&, const Vector<S>&, const S&);                       \
    template std::vector<int> greedy_actions<S>(const QTable<S>&, int);                                      \
    template std::vector<int> greedy_actions<S>(const QTable<S>&, int, const S&);                            \
    template Policy greedy_policy<S>(const QTable<S>&);                                                      \
    template Vector<S> evaluate_policy<S>(const TabularMdp<S>&, const Vector<S>&, const Policy&, const S&); \
    template Vector<S> visit_counts<S>(const TabularMdp<S>&, const Policy&, int, const S&);                  \
    template S visit_count<S>(const TabularMdp<S>&, const Policy&, int, int, const S&);                      \
    template Vector<S> reach_probabilities<S>(const TabularMdp<S>&, const Policy&, int);                     \
    template S return_probability<S>(const TabularMdp<S>&, const Policy&, int);                              \
    template S bellman_residual<S>(const TabularMdp<S>&, const Vector<S>&, const QTable<S>&);                \
    template std::vector<bool> reachable_from<S>(const TabularMdp<S>&, const std::vector<int>&);             \
    template TabularMdp<S> permute_states<S>(const TabularMdp<S>&, const std::vector<int>&);

POWERSEEK_INSTANTIATE(double)
POWERSEEK_INSTANTIATE(Rational)

#undef POWERSEEK_INSTANTIATE

}  // namespace powerseek
