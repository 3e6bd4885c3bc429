#pragma once

// Reference computations written independently of the library: dense
// Gaussian elimination, policy enumeration, trajectory sums, bisection.
// Only the MDP container is shared.

#include "powerseek/mdp.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

using powerseek::Rational;
using powerseek::TabularMdp;
using Dense = std::vector<std::vector<Rational>>;

inline std::vector<Rational> gauss_solve(Dense a, std::vector<Rational> b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && a[p][c] == 0) ++p;
        if (p == n) throw std::runtime_error("oracle: singular system");
        std::swap(a[p], a[c]);
        std::swap(b[p], b[c]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || a[r][c] == 0) continue;
            const Rational f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    std::vector<Rational> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return x;
}

/// Calls fn on every deterministic stationary policy.
inline void for_each_policy(const TabularMdp<Rational>& mdp, const std::function<void(const std::vector<int>&)>& fn) {
    const int d = mdp.state_count();
    std::vector<int> pi(d, 0);
    while (true) {
        fn(pi);
        int s = 0;
        while (s < d && ++pi[s] == mdp.action_count(s)) pi[s++] = 0;
        if (s == d) return;
    }
}

/// Probability of hitting `target` at some time >= 0 from every state.
inline std::vector<Rational> hit_probabilities(const TabularMdp<Rational>& mdp, const std::vector<int>& pi,
                                               int target) {
    const int d = mdp.state_count();
    // States that can see the target in the policy's graph.
    std::vector<bool> can(d, false);
    can[target] = true;
    for (bool changed = true; changed;) {
        changed = false;
        for (int s = 0; s < d; ++s) {
            if (can[s]) continue;
            for (const auto& o : mdp.outcomes(s, pi[s])) {
                if (o.prob > 0 && can[o.next]) {
                    can[s] = true;
                    changed = true;
                }
            }
        }
    }
    Dense a(d, std::vector<Rational>(d, Rational(0)));
    std::vector<Rational> b(d, Rational(0));
    for (int s = 0; s < d; ++s) {
        a[s][s] = 1;
        if (s == target) {
            b[s] = 1;
        } else if (can[s]) {
            for (const auto& o : mdp.outcomes(s, pi[s])) a[s][o.next] -= o.prob;
        }
    }
    return gauss_solve(a, b);
}

inline Rational return_probability(const TabularMdp<Rational>& mdp, const std::vector<int>& pi, int s) {
    const auto h = hit_probabilities(mdp, pi, s);
    Rational r(0);
    for (const auto& o : mdp.outcomes(s, pi[s])) r += o.prob * h[o.next];
    return r;
}

/// Non-terminal states that some deterministic policy returns to with
/// probability one.
inline std::vector<bool> brute_recurrent(const TabularMdp<Rational>& mdp) {
    std::vector<bool> out(mdp.state_count(), false);
    for_each_policy(mdp, [&](const std::vector<int>& pi) {
        for (int s = 0; s < mdp.state_count(); ++s) {
            if (!out[s] && !mdp.is_terminal(s) && return_probability(mdp, pi, s) == 1) out[s] = true;
        }
    });
    return out;
}

inline std::vector<bool> brute_almost_sure(const TabularMdp<Rational>& mdp, int target) {
    std::vector<bool> out(mdp.state_count(), false);
    for_each_policy(mdp, [&](const std::vector<int>& pi) {
        const auto h = hit_probabilities(mdp, pi, target);
        for (int s = 0; s < mdp.state_count(); ++s) {
            if (h[s] == 1) out[s] = true;
        }
    });
    return out;
}

/// sum_{t=1}^{horizon} gamma^(t-1) P(s_t = target), s_0 = start.
inline double truncated_visits(const TabularMdp<Rational>& mdp, const std::vector<int>& pi, int start, int target,
                               double gamma, int horizon = 500) {
    const int d = mdp.state_count();
    std::vector<double> x(d, 0.0);
    x[start] = 1.0;
    double total = 0.0, weight = 1.0;
    for (int t = 1; t <= horizon; ++t) {
        std::vector<double> y(d, 0.0);
        for (int s = 0; s < d; ++s) {
            if (x[s] == 0.0) continue;
            for (const auto& o : mdp.outcomes(s, pi[s])) y[o.next] += x[s] * o.prob.get_d();
        }
        x = std::move(y);
        total += weight * x[target];
        weight *= gamma;
    }
    return total;
}

/// V(s) = gamma sum_s' P(s'|s) (r(s') + V(s')), V(terminal) = 0.
inline std::vector<Rational> policy_value(const TabularMdp<Rational>& mdp, const std::vector<Rational>& r,
                                          const std::vector<int>& pi, const Rational& gamma) {
    const int d = mdp.state_count();
    Dense a(d, std::vector<Rational>(d, Rational(0)));
    std::vector<Rational> b(d, Rational(0));
    for (int s = 0; s < d; ++s) {
        a[s][s] = 1;
        if (mdp.is_terminal(s)) continue;
        for (const auto& o : mdp.outcomes(s, pi[s])) {
            b[s] += gamma * o.prob * r[o.next];
            if (!mdp.is_terminal(o.next)) a[s][o.next] -= gamma * o.prob;
        }
    }
    return gauss_solve(a, b);
}

/// max over deterministic policies of policy_value, per state.
inline std::vector<Rational> brute_optimal_values(const TabularMdp<Rational>& mdp, const std::vector<Rational>& r,
                                                  const Rational& gamma) {
    std::vector<Rational> best;
    for_each_policy(mdp, [&](const std::vector<int>& pi) {
        const auto v = policy_value(mdp, r, pi, gamma);
        if (best.empty()) {
            best = v;
            return;
        }
        for (std::size_t s = 0; s < v.size(); ++s) {
            if (v[s] > best[s]) best[s] = v[s];
        }
    });
    return best;
}

/// Root of f on [lo, hi] by bisection; f(lo) and f(hi) must differ in sign.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-13) {
    const bool lo_negative = f(lo) < 0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if ((f(mid) < 0) == lo_negative) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Visit count of s_rec from s_new in a lasso: gamma^(m-1) / (1 - gamma^L).
inline double lasso_visits(int m, int L, double gamma) {
    return std::pow(gamma, m - 1) / (1.0 - std::pow(gamma, L));
}

/// gamma* of a lasso: root of gamma^(m-1) + gamma^L - 1 in [0, 1].
inline double lasso_gamma_star(int m, int L) {
    if (m == 1) return 0.0;
    return bisect([&](double g) { return std::pow(g, m - 1) + std::pow(g, L) - 1.0; }, 0.0, 1.0);
}

}  // namespace oracle
