#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "dynat/core.hpp"
#include "dynat/rng.hpp"

using namespace dynat;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

}  // namespace

TEST(Rng, SplitMixMatchesReferenceOutput) {
    // First output of the reference SplitMix64 generator seeded with 0.
    EXPECT_EQ(Rng::splitmix64(0), 0xE220A8397B1DCDAFULL);
}

TEST(Rng, SameSeedSameSequence) {
    Rng a(1234), b(1234), c(1235);
    bool differs = false;
    for (int i = 0; i < 1000; ++i) {
        const auto x = a.next_u64();
        EXPECT_EQ(x, b.next_u64());
        differs |= x != c.next_u64();
    }
    EXPECT_TRUE(differs);
}

TEST(Rng, DerivedStreamsAreDistinct) {
    EXPECT_NE(Rng::derive(7, 1), Rng::derive(7, 2));
    EXPECT_NE(Rng::derive(7, 1), Rng::derive(8, 1));
    EXPECT_EQ(Rng::derive(7, 1), Rng::derive(7, 1));
}

TEST(Rng, UniformDrawsStayInRange) {
    Rng rng(99);
    std::array<int, 7> hist{};
    for (int i = 0; i < 70'000; ++i) {
        const double u = rng.uniform01();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        const auto k = rng.uniform_int(7);
        ASSERT_LT(k, 7u);
        ++hist[k];
    }
    for (int count : hist) EXPECT_NEAR(count / 70'000.0, 1.0 / 7.0, 0.01);
    EXPECT_EQ(rng.uniform_int(1), 0u);
}

TEST(QTable, FreshTableIsZero) {
    QTable q(5, 3);
    EXPECT_EQ(q.n_states(), 5u);
    EXPECT_EQ(q.n_actions(), 3u);
    for (double v : q.values()) EXPECT_EQ(v, 0.0);
    q(StateId{2}, ActionId{1}) = 4.0;
    EXPECT_EQ(q.max(StateId{2}), 4.0);
    EXPECT_EQ(q.row(StateId{2})[1], 4.0);
    EXPECT_EQ(q.max(StateId{3}), 0.0);
}

TEST(QTable, EmptyShapeIsRejected) { EXPECT_THROW(QTable(0, 4), UsageError); }

TEST(Hyperparams, ValidateRejectsOutOfRange) {
    Hyperparams h;
    EXPECT_NO_THROW(h.validate());
    h.alpha = 1.5;
    EXPECT_THROW(h.validate(), ConfigError);
    h = Hyperparams{};
    h.c_uct = -1.0;
    EXPECT_THROW(h.validate(), ConfigError);
    h = Hyperparams{};
    h.lambda = std::nan("");
    EXPECT_THROW(h.validate(), ConfigError);
}

TEST(ArgmaxTiebreak, UniqueMaximum) {
    Rng rng(0);
    const std::vector<double> row{0, 5, 2};
    EXPECT_EQ(argmax_tiebreak(row, rng).index, 1u);
}

TEST(ArgmaxTiebreak, EmptyRowIsUsageError) {
    Rng rng(0);
    EXPECT_THROW(argmax_tiebreak(std::span<const double>{}, rng), UsageError);
}

TEST(ArgmaxTiebreak, TiesAreUniform) {
    Rng rng(42);
    const std::vector<double> row{3, 3, 3};
    std::array<int, 3> hist{};
    constexpr int draws = 10'000;
    for (int i = 0; i < draws; ++i) ++hist[argmax_tiebreak(row, rng).index];

    double chi2 = 0.0;
    for (int count : hist) {
        EXPECT_NEAR(count / double(draws), 1.0 / 3.0, 0.03);
        const double expected = draws / 3.0;
        chi2 += (count - expected) * (count - expected) / expected;
    }
    // 0.999 quantile of chi-square with 2 degrees of freedom.
    EXPECT_LT(chi2, 13.82);
}

TEST(ArgmaxTiebreak, InfiniteEntriesDominate) {
    Rng rng(5);
    const std::vector<double> row{inf, 0, inf};
    int seen0 = 0, seen2 = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto a = argmax_tiebreak(row, rng).index;
        ASSERT_NE(a, 1u);
        (a == 0 ? seen0 : seen2)++;
    }
    EXPECT_GT(seen0, 0);
    EXPECT_GT(seen2, 0);
}

TEST(EpsilonGreedy, ZeroEpsilonIsGreedy) {
    Rng rng(1);
    const std::vector<double> row{1, 0};
    for (int i = 0; i < 1000; ++i) EXPECT_EQ(epsilon_greedy(row, 0.0, rng).index, 0u);
}

TEST(EpsilonGreedy, UnitEpsilonIsUniform) {
    Rng rng(2);
    const std::vector<double> row{9, 0};
    int zeros = 0;
    for (int i = 0; i < 10'000; ++i) zeros += epsilon_greedy(row, 1.0, rng).index == 0;
    EXPECT_NEAR(zeros / 10'000.0, 0.5, 0.03);
}

TEST(EpsilonGreedy, SmallEpsilonMatchesAnalyticFrequency) {
    Rng rng(3);
    const std::vector<double> row{9, 0};
    int zeros = 0;
    for (int i = 0; i < 10'000; ++i) zeros += epsilon_greedy(row, 0.1, rng).index == 0;
    // 0.9 greedy + 0.1 * 1/2 uniform.
    EXPECT_NEAR(zeros / 10'000.0, 0.95, 0.02);
}

TEST(EpsilonGreedy, ZeroEpsilonEqualsArgmaxDrawForDraw) {
    Rng a(77), b(77);
    const std::vector<double> row{2, 2, 1, 2};
    for (int i = 0; i < 500; ++i) EXPECT_EQ(epsilon_greedy(row, 0.0, a), argmax_tiebreak(row, b));
}

TEST(EpsilonGreedy, DeterministicForIdenticalSeeds) {
    Rng a(8), b(8);
    const std::vector<double> row{0, 0, 1, 0};
    for (int i = 0; i < 500; ++i) EXPECT_EQ(epsilon_greedy(row, 0.3, a), epsilon_greedy(row, 0.3, b));
}
