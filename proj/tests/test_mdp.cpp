#include "helpers.hpp"
#include "oracles.hpp"

#include "powerseek/mdp.hpp"

#include <doctest.h>

using namespace powerseek;
using testing_support::random_mdp;

namespace {

// s0 --a--> s1 (terminal), s0 --b--> s2, s2 loops.
TabularMdp<Rational> branching_pair() {
    TabularMdp<Rational> mdp(3);
    mdp.add_action(0, {{1, Rational(1)}}, "a");
    mdp.add_action(0, {{2, Rational(1)}}, "b");
    mdp.set_terminal(1);
    mdp.add_action(2, {{2, Rational(1)}}, "loop");
    return mdp;
}

std::vector<Rational> as_std(const Vector<Rational>& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

TEST_SUITE("mdp") {

TEST_CASE("terminal reward is collected once") {
    const auto mdp = branching_pair();
    const auto theta = testing_support::rationals({"0", "1", "0"});
    const auto q = optimal_q(mdp, theta, Rational(1, 2));
    CHECK(q(0, 0) == Rational(1, 2));
    CHECK(q(0, 1) == Rational(0));
    CHECK(q(1, 0) == Rational(0));
}

TEST_CASE("looping reward accumulates geometrically") {
    const auto mdp = branching_pair();
    const auto theta = testing_support::rationals({"0", "0", "1"});
    const auto q = optimal_q(mdp, theta, Rational(1, 2));
    // 1/2 + 1/4 + ... = 1 per step into s2
    CHECK(q(0, 1) == Rational(1));
    CHECK(greedy_actions(q, 0) == std::vector<int>{1});
}

TEST_CASE("ties are exact in rational mode") {
    const auto mdp = branching_pair();
    const auto theta = testing_support::rationals({"0", "2", "1"});
    const auto q = optimal_q(mdp, theta, Rational(1, 2));
    CHECK(q(0, 0) == q(0, 1));
    CHECK(greedy_actions(q, 0) == std::vector<int>{0, 1});
    CHECK(greedy_policy(q)[0] == 0);
}

TEST_CASE("optimal values agree with policy enumeration") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const auto mdp = random_mdp(seed, 4, 2);
        SplitMix64 rng(seed * 7);
        Vector<Rational> theta(4);
        for (int s = 0; s < 4; ++s) theta(s) = uniform_scalar(rng, Rational(1));
        const Rational gamma(3, 4);
        const auto q = optimal_q(mdp, theta, gamma);
        const auto best = oracle::brute_optimal_values(mdp, as_std(theta), gamma);
        for (int s = 0; s < 4; ++s) {
            if (mdp.is_terminal(s)) continue;
            CHECK(q.max_value(s) == best[s]);
        }
        CHECK(bellman_residual(mdp, theta, q) == 0);

        const auto qd = optimal_q(mdp.cast<double>(), Vector<double>(theta.cast<double>()), 0.75);
        for (int s = 0; s < 4; ++s) {
            if (!mdp.is_terminal(s)) CHECK(std::abs(qd.max_value(s) - best[s].get_d()) < 1e-9);
        }
    }
}

TEST_CASE("evaluate_policy matches the dense oracle") {
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
        const auto mdp = random_mdp(seed, 4, 2);
        Policy pi(4, 0);
        for (int s = 0; s < 4; ++s) pi[s] = mdp.action_count(s) - 1;
        const auto theta = testing_support::rationals({"1", "1/2", "0", "3"});
        const auto v = evaluate_policy(mdp, theta, pi, Rational(9, 10));
        CHECK(as_std(v) == oracle::policy_value(mdp, as_std(theta), pi, Rational(9, 10)));
    }
}

TEST_CASE("visit counts match truncated trajectory sums") {
    for (std::uint64_t seed = 200; seed < 230; ++seed) {
        const auto mdp = random_mdp(seed, 4, 2);
        Policy pi(4, 0);
        for (int target = 0; target < 4; ++target) {
            if (mdp.is_terminal(target)) continue;
            const auto n = visit_counts(mdp, pi, target, Rational(4, 5));
            for (int s = 0; s < 4; ++s) {
                CHECK(std::abs(n(s).get_d() - oracle::truncated_visits(mdp, pi, s, target, 0.8)) < 1e-6);
            }
        }
    }
}

TEST_CASE("reach and return probabilities match the dense oracle") {
    for (std::uint64_t seed = 300; seed < 330; ++seed) {
        const auto mdp = random_mdp(seed, 4, 2);
        Policy pi(4, 0);
        for (int target = 0; target < 4; ++target) {
            CHECK(as_std(reach_probabilities(mdp, pi, target)) == oracle::hit_probabilities(mdp, pi, target));
            if (!mdp.is_terminal(target)) {
                CHECK(return_probability(mdp, pi, target) == oracle::return_probability(mdp, pi, target));
            }
        }
    }
}

TEST_CASE("validation rejects malformed models") {
    TabularMdp<Rational> bad(2);
    bad.add_action(0, {{1, Rational(1, 2)}});
    bad.set_terminal(1);
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);

    TabularMdp<Rational> empty_state(2);
    empty_state.set_terminal(0);
    CHECK_THROWS_AS(empty_state.validate(), InvalidArgument);

    TabularMdp<Rational> negative(1);
    negative.add_action(0, {{0, Rational(3, 2)}, {0, Rational(-1, 2)}});
    CHECK_NOTHROW(negative.validate());  // merged into one outcome of mass 1
    CHECK(negative.outcomes(0, 0).size() == 1);
}

TEST_CASE("argument checks") {
    const auto mdp = branching_pair();
    CHECK_THROWS_AS(check_discount(Rational(1)), InvalidArgument);
    CHECK_THROWS_AS(check_discount(-0.1), InvalidArgument);
    CHECK_NOTHROW(check_discount(Rational(0)));
    CHECK_THROWS_AS(check_reward(mdp, testing_support::rationals({"0", "-1", "0"})), InvalidArgument);
    CHECK_THROWS_AS(check_reward(mdp, testing_support::rationals({"0", "1"})), InvalidArgument);
    CHECK_THROWS_AS(check_policy(mdp, Policy{2, 0, 0}), InvalidArgument);
}

TEST_CASE("permute_states relabels consistently") {
    const auto mdp = branching_pair();
    const std::vector<int> perm{2, 0, 1};
    const auto moved = permute_states(mdp, perm);
    const auto theta = testing_support::rationals({"0", "1", "3"});
    Vector<Rational> moved_theta(3);
    for (int s = 0; s < 3; ++s) moved_theta(perm[s]) = theta(s);
    const auto q = optimal_q(mdp, theta, Rational(1, 2));
    const auto q2 = optimal_q(moved, moved_theta, Rational(1, 2));
    CHECK(q.max_value(0) == q2.max_value(2));
    CHECK(moved.is_terminal(0));
    CHECK(moved.state_name(2) == mdp.state_name(0));
}

TEST_CASE("state and action lookup") {
    auto mdp = branching_pair();
    mdp.set_state_name(2, "loop_state");
    CHECK(mdp.find_state("loop_state") == 2);
    CHECK_FALSE(mdp.find_state("nowhere").has_value());
    CHECK(mdp.find_action(0, "b") == 1);
    CHECK(mdp.action_name(1, 0) == "stay");
    CHECK(reachable_from(mdp, {2}) == std::vector<bool>{false, false, true});
}

}
