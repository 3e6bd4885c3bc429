#include "helpers.hpp"
#include "oracles.hpp"

#include "powerseek/io.hpp"
#include "powerseek/scenarios.hpp"

#include <doctest.h>

using namespace powerseek;

TEST_SUITE("scenarios") {

TEST_CASE("lasso sizes and layout") {
    CHECK(make_lasso({1, 1, std::nullopt}).mdp.state_count() == 3);
    const auto l23 = make_lasso({2, 3, std::nullopt});
    CHECK(l23.mdp.state_count() == 6);
    const auto layout = lasso_layout(2, 3);
    CHECK(layout.s_rec == 2);
    CHECK(layout.s_term == 5);
    CHECK(layout.cycle == std::vector<int>{2, 3, 4});
    CHECK(l23.mdp.state_name(layout.s_rec) == "s_rec");
    CHECK_THROWS_AS(make_lasso({0, 1, std::nullopt}), InvalidArgument);
}

TEST_CASE("every lasso validates and matches the closed forms") {
    for (int m = 1; m <= 4; ++m) {
        for (int L = 1; L <= 4; ++L) {
            const auto lasso = make_lasso({m, L, std::nullopt});
            CHECK(validate_scenario(lasso).ok());
            const Policy pi = reach_and_revisit(lasso.mdp, 0, m);
            for (int k = 1; k <= 9; ++k) {
                const double g = k / 10.0;
                CHECK(std::abs(visit_count(lasso.mdp, pi, 0, m, testing_support::ratio(k, 10)).get_d() -
                               oracle::lasso_visits(m, L, g)) < 1e-9);
            }
            const auto t = gamma_star(lasso.mdp, 0, m);
            CHECK(std::abs(t.gamma_star - oracle::lasso_gamma_star(m, L)) < 1e-6);
        }
    }
}

TEST_CASE("random scenarios are reproducible") {
    const RandomSpec spec{17, 7, 2, 2, 1};
    const auto a = make_random(spec);
    const auto b = make_random(spec);
    CHECK(scenario_to_json(a.scenario).dump() == scenario_to_json(b.scenario).dump());
    CHECK(a.attempts >= 1);
    CHECK(scenario_to_json(make_random({18, 7, 2, 2, 1}).scenario).dump() != scenario_to_json(a.scenario).dump());
}

TEST_CASE("random scenarios satisfy the generator contract") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto g = make_random({seed, 3 + static_cast<int>(seed % 5), 2, 2, 0});
        CHECK(validate_scenario(g.scenario).ok());
        CHECK_FALSE(reachable_recurrent_states(g.scenario).empty());
    }
}

TEST_CASE("branching one gives deterministic models") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto g = make_random({seed, 6, 3, 1, 1});
        const auto& mdp = g.scenario.mdp;
        for (int s = 0; s < mdp.state_count(); ++s) {
            for (int a = 0; a < mdp.action_count(s); ++a) CHECK(mdp.outcomes(s, a).size() == 1);
        }
    }
}

TEST_CASE("random generator rejects impossible sizes") {
    CHECK_THROWS_AS(make_random({0, 2, 2, 2, 0}), InvalidArgument);
    CHECK_THROWS_AS(make_random({0, kRandomDimensionCap + 1, 2, 2, 0}), InvalidArgument);
    CHECK_THROWS_AS(make_random({0, 5, 2, 2, 1}), InvalidArgument);
}

TEST_CASE("coinrun chain") {
    const auto chain = make_coinrun_chain({5, 4}, {5, 2});
    CHECK(validate_scenario(chain.scenario).ok());
    CHECK(chain.scenario.training.pairs().size() == 4);
    for (const auto& p : chain.scenario.training.pairs()) CHECK(chain.scenario.mdp.action_name(p.state, p.action) == "right");
    const Rational gamma(9, 10);
    CHECK(classify_behavior(chain, optimal_q(chain.scenario.mdp, chain.end_goal, gamma)) == ChainBehavior::EndSeeking);
    CHECK(classify_behavior(chain, optimal_q(chain.scenario.mdp, chain.coin_goal, gamma)) == ChainBehavior::CoinSeeking);

    Vector<Rational> quit = Vector<Rational>::Zero(chain.scenario.mdp.state_count());
    quit(chain.scenario.s_term) = 1;
    CHECK(classify_behavior(chain, optimal_q(chain.scenario.mdp, quit, gamma)) == ChainBehavior::Shutdown);

    CHECK_THROWS_AS(make_coinrun_chain({5, 2}, {5, 2}), InvalidArgument);
    CHECK_THROWS_AS(make_coinrun_chain({5, 4}, {5, 4}), InvalidArgument);
    CHECK_THROWS_AS(make_coinrun_chain({5, 4}, {5, 7}), InvalidArgument);
}

TEST_CASE("the end-seeking goal walks past the coin") {
    const auto chain = make_coinrun_chain({5, 4}, {5, 2});
    const auto& mdp = chain.scenario.mdp;
    const Policy pi = greedy_policy(optimal_q(mdp, chain.end_goal, Rational(9, 10)));
    CHECK(mdp.action_name(chain.ood_coin, pi[chain.ood_coin]) == "right");
    const Policy coin = greedy_policy(optimal_q(mdp, chain.coin_goal, Rational(9, 10)));
    CHECK(mdp.action_name(chain.scenario.s_new, coin[chain.scenario.s_new]) == "right");
    CHECK(mdp.action_name(chain.ood_cells[1], coin[chain.ood_cells[1]]) == "right");
}

}
