#include "helpers.hpp"
#include "oracles.hpp"

#include "powerseek/recurrence.hpp"
#include "powerseek/scenarios.hpp"

#include <doctest.h>

using namespace powerseek;
using testing_support::random_mdp;

TEST_SUITE("recurrence") {

TEST_CASE("self-loop is recurrent, transient chain is not") {
    TabularMdp<Rational> mdp(3);
    mdp.add_action(0, {{1, Rational(1)}});
    mdp.add_action(1, {{1, Rational(1)}});
    mdp.add_action(2, {{2, Rational(1, 2)}, {0, Rational(1, 2)}});
    const auto report = recurrent_states(mdp);
    CHECK(report.recurrent == std::vector<int>{1});
    CHECK_FALSE(report.is_recurrent(2));
    CHECK(return_probability(mdp, report.witness.at(1), 1) == 1);
}

TEST_CASE("an action leaking to a terminal breaks the component") {
    TabularMdp<Rational> mdp(3);
    mdp.add_action(0, {{1, Rational(1, 2)}, {2, Rational(1, 2)}});
    mdp.add_action(1, {{0, Rational(1)}});
    mdp.set_terminal(2);
    CHECK(recurrent_states(mdp).recurrent.empty());

    mdp.add_action(0, {{1, Rational(1)}});
    CHECK(recurrent_states(mdp).recurrent == std::vector<int>{0, 1});
}

TEST_CASE("recurrent states agree with policy enumeration") {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        const auto mdp = random_mdp(seed, 4, 2);
        const auto report = recurrent_states(mdp);
        const auto brute = oracle::brute_recurrent(mdp);
        for (int s = 0; s < 4; ++s) CHECK(report.is_recurrent(s) == brute[s]);
        for (const auto& [s, pi] : report.witness) CHECK(oracle::return_probability(mdp, pi, s) == 1);
    }
}

TEST_CASE("almost-sure region agrees with policy enumeration") {
    for (std::uint64_t seed = 61; seed <= 100; ++seed) {
        const auto mdp = random_mdp(seed, 4, 2);
        for (int target = 0; target < 4; ++target) {
            CHECK(almost_sure_region(mdp, target) == oracle::brute_almost_sure(mdp, target));
            for (int from = 0; from < 4; ++from) {
                const auto pi = almost_sure_reach_policy(mdp, from, target);
                CHECK(pi.has_value() == oracle::brute_almost_sure(mdp, target)[from]);
                if (pi) CHECK(oracle::hit_probabilities(mdp, *pi, target)[from] == 1);
            }
        }
    }
}

TEST_CASE("reach-and-revisit is almost sure in both phases") {
    for (std::uint64_t seed = 101; seed <= 160; ++seed) {
        const auto mdp = random_mdp(seed, 4, 2);
        const auto report = recurrent_states(mdp);
        for (int s : report.recurrent) {
            if (!almost_sure_region(mdp, s)[0]) {
                CHECK_THROWS_AS(reach_and_revisit(mdp, 0, s), InvalidArgument);
                continue;
            }
            const auto built = reach_and_revisit_construction(mdp, 0, s);
            CHECK(oracle::hit_probabilities(mdp, built.policy, s)[0] == 1);
            CHECK(oracle::return_probability(mdp, built.policy, s) == 1);
            CHECK(oracle::return_probability(mdp, built.revisiting, s) == 1);
        }
    }
}

TEST_CASE("non-recurrent target is rejected") {
    TabularMdp<Rational> mdp(2);
    mdp.add_action(0, {{1, Rational(1)}});
    mdp.add_action(1, {{1, Rational(1)}});
    CHECK_THROWS_AS(reach_and_revisit(mdp, 1, 0), InvalidArgument);
    CHECK_THROWS_AS(gamma_star(mdp, 1, 0), InvalidArgument);
}

TEST_CASE("lasso thresholds match the closed form") {
    for (int m = 1; m <= 4; ++m) {
        for (int L = 1; L <= 4; ++L) {
            const auto scenario = make_lasso({m, L, std::nullopt});
            const auto layout = lasso_layout(m, L);
            const auto t = gamma_star(scenario.mdp, layout.s_new, layout.s_rec);
            CHECK(std::abs(t.gamma_star - oracle::lasso_gamma_star(m, L)) < 1e-9);
            const auto td = gamma_star(scenario.mdp.cast<double>(), layout.s_new, layout.s_rec);
            CHECK(std::abs(td.gamma_star - t.gamma_star) < 1e-9);
        }
    }
    const auto l23 = make_lasso({2, 3, std::nullopt});
    CHECK(std::abs(gamma_star(l23.mdp, 0, 2).gamma_star - 0.682328) < 1e-6);
    CHECK(gamma_star(make_lasso({1, 3, std::nullopt}).mdp, 0, 1).gamma_star == 0.0);
}

TEST_CASE("cycle states have their own thresholds") {
    // c1 sits one step further along, so gamma^2 / (1 - gamma^3) = 1.
    const auto scenario = make_lasso({2, 3, std::nullopt});
    const double c1 = oracle::bisect([](double g) { return g * g + g * g * g - 1; }, 0, 1);
    const double c2 = oracle::bisect([](double g) { return 2 * g * g * g - 1; }, 0, 1);
    CHECK(std::abs(gamma_star(scenario.mdp, 0, 3).gamma_star - c1) < 1e-9);
    CHECK(std::abs(gamma_star(scenario.mdp, 0, 4).gamma_star - c2) < 1e-9);
}

TEST_CASE("end components") {
    const auto scenario = make_lasso({2, 2, std::nullopt});
    const auto mecs = maximal_end_components(scenario.mdp);
    REQUIRE(mecs.size() == 1);
    CHECK(mecs[0].states == std::vector<int>{2, 3});
}

}
