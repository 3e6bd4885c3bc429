#include "helpers.hpp"

#include "powerseek/goalset.hpp"
#include "powerseek/scenarios.hpp"

#include <doctest.h>

using namespace powerseek;
using testing_support::rationals;

namespace {

// t0 --exit--> t1 (terminal), t0 --stay--> t0; trained to exit.
TabularMdp<Rational> exit_or_stay() {
    TabularMdp<Rational> mdp(2);
    mdp.add_action(0, {{1, Rational(1)}}, "exit");
    mdp.add_action(0, {{0, Rational(1)}}, "stay");
    mdp.set_terminal(1);
    return mdp;
}

}  // namespace

TEST_SUITE("goalset") {

TEST_CASE("q-optimal membership compares discounted returns") {
    const auto mdp = exit_or_stay();
    const TrainingRecord training({{0, 0}});
    const Rational gamma(1, 2);
    // exit: gamma r(t1); stay forever: gamma r(t0) / (1 - gamma)
    CHECK(in_goal_set(rationals({"1", "2"}), mdp, training, GoalSetMode::QOptimal, gamma));
    CHECK(in_goal_set(rationals({"1", "1"}), mdp, training, GoalSetMode::QOptimal, gamma) == false);
    CHECK(in_goal_set(rationals({"1/2", "1"}), mdp, training, GoalSetMode::QOptimal, gamma));  // tie admits
}

TEST_CASE("myopic membership looks one step ahead") {
    const auto mdp = exit_or_stay();
    const TrainingRecord training({{0, 0}});
    CHECK(in_goal_set(rationals({"1", "1"}), mdp, training, GoalSetMode::Myopic, Rational(1, 2)));
    CHECK_FALSE(in_goal_set(rationals({"2", "1"}), mdp, training, GoalSetMode::Myopic, Rational(1, 2)));
}

TEST_CASE("empty record admits every vector") {
    const auto mdp = exit_or_stay();
    CHECK(in_goal_set(rationals({"5", "0"}), mdp, TrainingRecord{}, GoalSetMode::QOptimal, Rational(9, 10)));
    const auto sample = sample_goal_set(mdp, TrainingRecord{}, Rational(1), 10, 7, GoalSetMode::QOptimal, Rational(1, 2));
    CHECK(sample.goals.size() == 10);
    CHECK(sample.attempts == 10);
    CHECK(sample.acceptance_rate() == 1.0);
}

TEST_CASE("coin and end goals are both training-compatible") {
    const auto chain = make_coinrun_chain({5, 4}, {5, 2});
    const auto& s = chain.scenario;
    for (auto mode : {GoalSetMode::QOptimal, GoalSetMode::Myopic}) {
        CHECK(in_goal_set(chain.coin_goal, s.mdp, s.training, mode, Rational(9, 10)));
        CHECK(in_goal_set(chain.end_goal, s.mdp, s.training, mode, Rational(9, 10)));
    }
}

TEST_CASE("sampling is reproducible and independent of batch size") {
    const auto mdp = exit_or_stay();
    const TrainingRecord training({{0, 0}});
    const auto a = sample_goal_set(mdp, training, Rational(1), 20, 42, GoalSetMode::QOptimal, Rational(1, 2));
    const auto b = sample_goal_set(mdp, training, Rational(1), 20, 42, GoalSetMode::QOptimal, Rational(1, 2));
    const auto c = sample_goal_set(mdp, training, Rational(1), 5, 42, GoalSetMode::QOptimal, Rational(1, 2));
    REQUIRE(a.goals.size() == 20);
    for (std::size_t i = 0; i < a.goals.size(); ++i) CHECK(vectors_equal(a.goals[i], b.goals[i]));
    for (std::size_t i = 0; i < c.goals.size(); ++i) CHECK(vectors_equal(a.goals[i], c.goals[i]));
    for (const auto& g : a.goals) {
        CHECK(in_goal_set(g, mdp, training, GoalSetMode::QOptimal, Rational(1, 2)));
        CHECK(g.minCoeff() >= 0);
        CHECK(g.maxCoeff() <= 1);
    }
    CHECK(a.acceptance_rate() < 1.0);
}

TEST_CASE("sampling fails loudly when nothing is accepted") {
    // exit is optimal only when r(t0) <= r(t1) / 100
    const auto mdp = exit_or_stay();
    CHECK_THROWS_AS(sample_goal_set(mdp, TrainingRecord({{0, 0}}), Rational(1), 1, 3, GoalSetMode::QOptimal,
                                    Rational(99, 100), 5),
                    SamplingError);
    CHECK_THROWS_AS(TrainingRecord({{0, 0}, {0, 1}}), InvalidArgument);
}

TEST_CASE("partition and closure") {
    const auto chain = make_coinrun_chain({4, 3}, {4, 2});
    const auto part = partition_states(chain.scenario.mdp, chain.scenario.training, chain.scenario.s_new);
    CHECK(part.train == std::vector<int>{0, 1, 2});
    CHECK(part.ood.size() == 6);
    for (int s : part.reach) CHECK_FALSE(chain.scenario.training.contains(s));
    // the rewarded end cell is never itself a training state
    CHECK(closure_violations(chain.scenario.mdp, chain.scenario.training) == std::vector<int>{chain.train_coin});
    CHECK_THROWS_AS(partition_states(chain.scenario.mdp, chain.scenario.training, 0), InvalidArgument);
}

TEST_CASE("mode names round-trip") {
    CHECK(parse_goal_set_mode("myopic") == GoalSetMode::Myopic);
    CHECK(to_string(parse_goal_set_mode("q-optimal")) == "q-optimal");
    CHECK_THROWS_AS(parse_goal_set_mode("greedy"), InvalidArgument);
}

}
