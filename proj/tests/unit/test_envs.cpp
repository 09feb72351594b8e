#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "dynat/envs.hpp"
#include "oracles.hpp"

using namespace dynat;

namespace {

const Outcome* find_outcome(const std::vector<Outcome>& outs, std::size_t next) {
    const auto it = std::find_if(outs.begin(), outs.end(), [&](const Outcome& o) { return o.next_state.index == next; });
    return it == outs.end() ? nullptr : &*it;
}

}  // namespace

TEST(Environments, ResetReturnsStartState) {
    Rng rng(0);
    EXPECT_EQ(CliffWalking().reset(rng).index, 36u);  // (3,0) in a 4x12 row-major grid
    EXPECT_EQ(NChain().reset(rng).index, 0u);
    EXPECT_EQ(FrozenLake().reset(rng).index, 0u);
}

TEST(Environments, FactoryKnowsRegisteredNames) {
    for (auto name : environment_names()) EXPECT_EQ(make_environment(name)->name(), name);
    EXPECT_THROW(make_environment("taxi"), ConfigError);
    EXPECT_THROW(make_environment("nchain", 0), ConfigError);
    EXPECT_EQ(make_environment("cliffwalking", 17)->spec().max_steps_per_episode, 17u);
    EXPECT_EQ(make_environment("cliffwalking")->spec().max_steps_per_episode, 200u);
    EXPECT_EQ(make_environment("nchain")->spec().max_steps_per_episode, 100u);
    EXPECT_EQ(make_environment("frozenlake")->spec().max_steps_per_episode, 100u);
}

TEST(CliffWalking, RightFromStartFallsOffTheCliff) {
    CliffWalking env;
    Rng rng(0);
    env.reset(rng);
    const auto out = env.step(ActionId{CliffWalking::right}, rng);
    EXPECT_EQ(out.next_state, CliffWalking::cell(3, 1));
    EXPECT_EQ(out.reward, -100.0);
    EXPECT_TRUE(out.terminal);
    EXPECT_THROW(env.step(ActionId{CliffWalking::up}, rng), UsageError);
}

TEST(CliffWalking, OrdinaryMovesCostOne) {
    CliffWalking env;
    Rng rng(0);
    env.reset(rng);
    auto out = env.step(ActionId{CliffWalking::up}, rng);
    EXPECT_EQ(out.next_state, CliffWalking::cell(2, 0));
    EXPECT_EQ(out.reward, -1.0);
    EXPECT_FALSE(out.done());
    out = env.step(ActionId{CliffWalking::left}, rng);  // off-grid: stays put
    EXPECT_EQ(out.next_state, CliffWalking::cell(2, 0));
    EXPECT_EQ(out.reward, -1.0);
}

TEST(CliffWalking, OffGridMovesLeavePositionUnchanged) {
    const auto model = CliffWalking().true_model();
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 12; ++c) {
            const StateId s = CliffWalking::cell(r, c);
            if (model.terminal[s.index]) continue;
            auto check = [&](std::size_t action) {
                const auto& outs = model.at(s, ActionId{action});
                ASSERT_EQ(outs.size(), 1u);
                EXPECT_EQ(outs[0].next_state, s);
                EXPECT_EQ(outs[0].reward, -1.0);
            };
            if (r == 0) check(CliffWalking::up);
            if (c == 0) check(CliffWalking::left);
            if (c == 11) check(CliffWalking::right);
        }
    }
}

TEST(CliffWalking, TrueModelIsDeterministic) {
    const auto model = CliffWalking().true_model();
    for (const auto& outs : model.outcomes) {
        ASSERT_EQ(outs.size(), 1u);
        EXPECT_EQ(outs[0].probability, 1.0);
    }
    EXPECT_EQ(reference::max_fidelity_error(CliffWalking(), 50, 1), 0.0);
}

TEST(CliffWalking, StepCapTruncates) {
    CliffWalking env(3);
    Rng rng(0);
    env.reset(rng);
    EXPECT_FALSE(env.step(ActionId{CliffWalking::up}, rng).done());
    EXPECT_FALSE(env.step(ActionId{CliffWalking::up}, rng).done());
    const auto out = env.step(ActionId{CliffWalking::up}, rng);
    EXPECT_TRUE(out.truncated);
    EXPECT_FALSE(out.terminal);
    EXPECT_THROW(env.step(ActionId{CliffWalking::up}, rng), UsageError);
    env.reset(rng);
    EXPECT_EQ(env.steps_taken(), 0u);
}

TEST(NChain, ForwardAtLastStateWithoutSlipPaysTen) {
    NChain env(0.0);
    Rng rng(0);
    env.reset(rng);
    for (int i = 0; i < 4; ++i) EXPECT_EQ(env.step(ActionId{NChain::forward}, rng).reward, 0.0);
    const auto out = env.step(ActionId{NChain::forward}, rng);
    EXPECT_EQ(out.next_state.index, 4u);
    EXPECT_EQ(out.reward, 10.0);
    const auto back = env.step(ActionId{NChain::back}, rng);
    EXPECT_EQ(back.next_state.index, 0u);
    EXPECT_EQ(back.reward, 1.0);
}

TEST(NChain, BackSlipsIntoForwardDynamics) {
    const auto model = NChain(0.2).true_model();
    const auto& back_mid = model.at(StateId{2}, ActionId{NChain::back});
    ASSERT_EQ(back_mid.size(), 2u);
    EXPECT_NEAR(find_outcome(back_mid, 0)->probability, 0.8, 1e-12);
    EXPECT_EQ(find_outcome(back_mid, 0)->reward, 1.0);
    EXPECT_NEAR(find_outcome(back_mid, 3)->probability, 0.2, 1e-12);
    EXPECT_EQ(find_outcome(back_mid, 3)->reward, 0.0);
}

TEST(NChain, ForwardAtFirstStateTrueModel) {
    const auto model = NChain(0.2).true_model();
    const auto& outs = model.at(StateId{0}, ActionId{NChain::forward});
    ASSERT_EQ(outs.size(), 2u);
    EXPECT_NEAR(find_outcome(outs, 1)->probability, 0.8, 1e-12);
    EXPECT_EQ(find_outcome(outs, 1)->reward, 0.0);
    EXPECT_NEAR(find_outcome(outs, 0)->probability, 0.2, 1e-12);
    EXPECT_EQ(find_outcome(outs, 0)->reward, 1.0);
}

TEST(NChain, EpisodesRunToTheCap) {
    NChain env;
    Rng rng(4);
    env.reset(rng);
    std::size_t steps = 0;
    for (;;) {
        const auto out = env.step(ActionId{steps % 2}, rng);
        ++steps;
        ASSERT_FALSE(out.terminal);
        if (out.done()) break;
    }
    EXPECT_EQ(steps, 100u);
}

TEST(FrozenLake, FrozenCellUpSlipsThreeWays) {
    // State 6 is (1,2): Up -> 2, Left -> 5 (hole), Right -> 7 (hole).
    const auto model = FrozenLake().true_model();
    const auto& outs = model.at(StateId{6}, ActionId{FrozenLake::up});
    ASSERT_EQ(outs.size(), 3u);
    for (std::size_t next : {2u, 5u, 7u}) {
        const auto* o = find_outcome(outs, next);
        ASSERT_NE(o, nullptr);
        EXPECT_NEAR(o->probability, 1.0 / 3.0, 1e-12);
        EXPECT_EQ(o->reward, 0.0);
    }
}

TEST(FrozenLake, GoalPaysOneAndHolesPayZero) {
    const FrozenLake env;
    const auto model = env.true_model();
    const auto* to_goal = find_outcome(model.at(StateId{14}, ActionId{FrozenLake::right}), 15);
    ASSERT_NE(to_goal, nullptr);
    EXPECT_EQ(to_goal->reward, 1.0);
    EXPECT_TRUE(model.terminal[15]);
    for (std::size_t hole : {5u, 7u, 11u, 12u}) {
        EXPECT_TRUE(FrozenLake::is_hole(StateId{hole}));
        EXPECT_TRUE(model.terminal[hole]);
    }

    // Random walks: every goal entry pays 1 and ends the episode, holes pay 0.
    FrozenLake walker;
    Rng rng(11);
    for (int episode = 0; episode < 2000; ++episode) {
        walker.reset(rng);
        for (;;) {
            const auto out = walker.step(ActionId{rng.uniform_int(4)}, rng);
            if (FrozenLake::is_goal(out.next_state)) {
                EXPECT_EQ(out.reward, 1.0);
                EXPECT_TRUE(out.terminal);
            } else {
                EXPECT_EQ(out.reward, 0.0);
                EXPECT_EQ(out.terminal, FrozenLake::is_hole(out.next_state));
            }
            if (out.done()) break;
        }
        EXPECT_LE(walker.steps_taken(), 100u);
    }
}

TEST(TrueModel, ProbabilitiesSumToOne) {
    for (auto name : environment_names()) {
        const auto model = make_environment(name)->true_model();
        for (const auto& outs : model.outcomes) {
            double total = 0.0;
            for (const auto& o : outs) {
                EXPECT_GE(o.probability, 0.0);
                EXPECT_LE(o.probability, 1.0);
                EXPECT_LT(o.next_state.index, model.n_states);
                EXPECT_TRUE(std::isfinite(o.reward));
                total += o.probability;
            }
            EXPECT_NEAR(total, 1.0, 1e-12) << name;
        }
    }
}

TEST(TrueModel, SamplingMatchesEnumeration) {
    EXPECT_LE(reference::max_fidelity_error(NChain(), 100'000, 21), 0.01);
    EXPECT_LE(reference::max_fidelity_error(FrozenLake(), 100'000, 22), 0.01);
}

TEST(Environments, SimulateRejectsTerminalStates) {
    Rng rng(0);
    EXPECT_THROW(CliffWalking().simulate(CliffWalking::goal(), ActionId{0}, rng), UsageError);
    EXPECT_THROW(FrozenLake().simulate(StateId{5}, ActionId{0}, rng), UsageError);
    EXPECT_THROW(NChain().simulate(StateId{0}, ActionId{2}, rng), UsageError);
}
