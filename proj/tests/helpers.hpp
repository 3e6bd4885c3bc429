#pragma once

#include "powerseek/random.hpp"
#include "powerseek/mdp.hpp"

#include <string>

namespace testing_support {

using powerseek::Outcome;
using powerseek::Rational;
using powerseek::TabularMdp;

/// Small random MDP: each state is terminal with probability 1/5 (state 0
/// never is), otherwise 1..max_actions actions with 1..2 successors.
inline TabularMdp<Rational> random_mdp(std::uint64_t seed, int d, int max_actions) {
    powerseek::SplitMix64 rng(seed);
    TabularMdp<Rational> mdp(d);
    for (int s = 0; s < d; ++s) {
        if (s > 0 && rng.below(5) == 0) {
            mdp.set_terminal(s);
            continue;
        }
        const int actions = 1 + static_cast<int>(rng.below(max_actions));
        for (int a = 0; a < actions; ++a) {
            const int first = static_cast<int>(rng.below(d));
            if (rng.below(2) == 0) {
                mdp.add_action(s, {{first, Rational(1)}});
            } else {
                const int second = static_cast<int>(rng.below(d));
                const long w = 1 + static_cast<long>(rng.below(3));
                Rational p(w, 4);
                p.canonicalize();
                mdp.add_action(s, {{first, p}, {second, Rational(1) - p}});
            }
        }
    }
    return mdp;
}

inline Rational ratio(long p, long q) {
    Rational r(p, q);
    r.canonicalize();
    return r;
}

inline powerseek::Vector<Rational> rationals(std::initializer_list<const char*> values) {
    powerseek::Vector<Rational> v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (const char* x : values) v(i++) = powerseek::parse_rational(x);
    return v;
}

}  // namespace testing_support
