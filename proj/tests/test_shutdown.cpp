#include "helpers.hpp"
#include "oracles.hpp"

#include "powerseek/scenarios.hpp"
#include "powerseek/shutdown.hpp"

#include <doctest.h>

using namespace powerseek;
using testing_support::rationals;

namespace {

bool check_passed(const ValidationReport& report, const std::string& name) {
    for (const auto& c : report.checks) {
        if (c.name == name) return c.passed;
    }
    FAIL("no check named " << name);
    return false;
}

}  // namespace

TEST_SUITE("shutdown") {

TEST_CASE("lasso validates and qualifies above its threshold") {
    const auto lasso = make_lasso({2, 3, std::nullopt});
    const auto report = validate_scenario(lasso, std::optional<Rational>(Rational(9, 10)));
    CHECK(report.ok());
    CHECK(report.recurrent_reachable == std::vector<int>{2, 3, 4});
    CHECK(report.qualifying == std::vector<int>{2, 3, 4});
}

TEST_CASE("qualifying sets follow the thresholds") {
    const auto lasso = make_lasso({2, 3, std::nullopt});
    CHECK(qualifying_recurrent_states(lasso, Rational(1, 2)).empty());
    CHECK(qualifying_recurrent_states(lasso, Rational(7, 10)) == std::vector<int>{2});
    CHECK(qualifying_recurrent_states(lasso, Rational(77, 100)) == std::vector<int>{2, 3});
    CHECK(qualifying_recurrent_states(lasso, Rational(99, 100)) == std::vector<int>{2, 3, 4});
    CHECK_FALSE(validate_scenario(lasso, std::optional<Rational>(Rational(1, 2))).ok());
}

TEST_CASE("no reachable cycle means no qualifying state") {
    TabularMdp<Rational> mdp(3);
    mdp.add_action(0, {{1, Rational(1)}}, "shutdown");
    mdp.add_action(0, {{2, Rational(1)}}, "go");
    mdp.set_terminal(1);
    mdp.set_terminal(2);
    ShutdownScenario<Rational> s{"flat", mdp, rationals({"0", "1", "1"}), {}, 0, 1, 0};
    CHECK(validate_scenario(s).ok());
    CHECK(qualifying_recurrent_states(s, Rational(999, 1000)).empty());
    const auto family = retargeting_swaps(s, Rational(999, 1000));
    CHECK(family.n() == 0);
    CHECK_FALSE(family.warning.empty());
    CHECK(family.guaranteed_fraction() == 0.0);
}

TEST_CASE("distributional shift is checked") {
    auto chain = make_coinrun_chain({4, 3}, {4, 2});
    CHECK(validate_scenario(chain.scenario).ok());
    // let s_new jump into the training level
    auto leaky = chain.scenario;
    TabularMdp<Rational> mdp = leaky.mdp;
    mdp.add_action(leaky.s_new, {{0, Rational(1)}}, "warp");
    leaky.mdp = mdp;
    const auto report = validate_scenario(leaky);
    CHECK_FALSE(report.ok());
    CHECK_FALSE(check_passed(report, "distributional_shift"));
}

TEST_CASE("negative rewards and broken shutdown actions are reported") {
    auto lasso = make_lasso({1, 1, std::nullopt});
    lasso.reward(1) = -1;
    CHECK_FALSE(check_passed(validate_scenario(lasso), "rewards_nonnegative"));

    auto wrong = make_lasso({1, 1, std::nullopt});
    wrong.shutdown_action = 1;
    CHECK_FALSE(check_passed(validate_scenario(wrong), "shutdown_action"));

    auto not_terminal = make_lasso({1, 1, std::nullopt});
    not_terminal.s_term = 1;
    CHECK_FALSE(check_passed(validate_scenario(not_terminal), "s_term_terminal"));
}

TEST_CASE("swap family") {
    const auto lasso = make_lasso({2, 3, std::nullopt});
    const auto family = retargeting_swaps(lasso, Rational(77, 100));
    CHECK(family.n() == 2);
    CHECK(family.guaranteed_fraction() == doctest::Approx(2.0 / 3.0));
    for (std::size_t k = 0; k < family.n(); ++k) {
        const auto& image = family.swaps[k].image();
        for (int i = 0; i < 6; ++i) {
            if (i != lasso.s_term && i != family.partners[k]) CHECK(image[i] == i);
        }
    }
    CHECK(retargeting_swaps(lasso, Rational(7, 10)).guaranteed_fraction() == 0.5);
}

TEST_CASE("swap argument on the lasso") {
    const auto lasso = make_lasso({2, 3, std::nullopt});
    const Rational gamma(9, 10);
    const auto record = verify_prop_rec(lasso, lasso.reward, 2, gamma);
    CHECK(record.hypothesis);
    CHECK(record.reward_gap);
    CHECK(record.swapped_avoids);
    CHECK_FALSE(record.violation());
    // V = 0.9 / (1 - 0.729)
    CHECK(std::abs(record.visit_count.get_d() - oracle::lasso_visits(2, 3, 0.9)) < 1e-12);
    CHECK(record.visit_count == Rational(900, 271));
    CHECK(record.q_shutdown == gamma);
    CHECK(record.q_swapped_best_other == gamma * record.visit_count);
    CHECK(record.q_swapped_shutdown == 0);
}

TEST_CASE("tied rewards log the case without judging it") {
    const auto lasso = make_lasso({2, 3, std::nullopt});
    const auto theta = rationals({"0", "0", "0", "0", "0", "0"});
    const auto record = verify_prop_rec(lasso, theta, 2, Rational(9, 10));
    CHECK_FALSE(record.hypothesis);
    CHECK(record.tie_case);
    CHECK_FALSE(record.violation());
}

TEST_CASE("the threshold precondition is enforced") {
    const auto lasso = make_lasso({2, 3, std::nullopt});
    CHECK_THROWS_AS(verify_prop_rec(lasso, lasso.reward, 2, Rational(1, 2)), InvalidArgument);
    CHECK_THROWS_AS(verify_prop_rec(lasso, lasso.reward, 1, Rational(9, 10)), InvalidArgument);
}

TEST_CASE("statistics with three swaps") {
    const auto lasso = make_lasso({2, 3, std::nullopt});
    const auto sample = sample_goal_set(lasso.mdp, lasso.training, Rational(1), 4, 11, GoalSetMode::QOptimal,
                                        Rational(9, 10));
    const auto stats = avoid_shutdown_stats(lasso, sample.goals, Rational(9, 10));
    CHECK(stats.n == 3);
    CHECK_FALSE(stats.vacuous);
    CHECK(stats.guaranteed_fraction == 0.75);
    CHECK(stats.orbit_pass_rate == 1.0);
    CHECK(stats.certified_fraction == 1.0);
    for (const auto& g : stats.goals) {
        CHECK(g.orbit_size == 720);
        CHECK(g.a1 >= 3 * g.a0);
        CHECK(g.certified == std::optional<bool>(true));
    }
}

TEST_CASE("statistics below every threshold are vacuous") {
    const auto lasso = make_lasso({2, 3, std::nullopt});
    const std::vector<Vector<Rational>> goals{lasso.reward};
    const auto stats = avoid_shutdown_stats(lasso, goals, Rational(1, 2));
    CHECK(stats.n == 0);
    CHECK(stats.vacuous);
    CHECK(stats.guaranteed_fraction == 0.0);
    CHECK_FALSE(stats.goals[0].certified.has_value());
}

TEST_CASE("float mode agrees with exact mode on the lasso") {
    const auto exact = make_lasso({2, 3, std::nullopt});
    const auto approx = exact.cast<double>();
    CHECK(qualifying_recurrent_states(approx, 0.9) == qualifying_recurrent_states(exact, Rational(9, 10)));
    const auto record = verify_prop_rec(approx, approx.reward, 2, 0.9);
    CHECK_FALSE(record.violation());
    CHECK(record.visit_count == doctest::Approx(oracle::lasso_visits(2, 3, 0.9)).epsilon(1e-12));
}

}
