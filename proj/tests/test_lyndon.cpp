#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "pathsig/lyndon.hpp"

using namespace pathsig;

namespace {

std::vector<std::string> names(const std::vector<LyndonWord>& ws) {
    std::vector<std::string> out;
    for (const auto& w : ws) out.push_back(w.str());
    return out;
}

}  // namespace

TEST(LyndonWords, TwoLettersDepthThree) {
    EXPECT_EQ(names(lyndon_words(2, 3)), (std::vector<std::string>{"1", "2", "12", "112", "122"}));
}

TEST(LyndonWords, OneLetter) { EXPECT_EQ(names(lyndon_words(1, 4)), (std::vector<std::string>{"1"})); }

TEST(LyndonWords, ThreeLettersDepthTwo) {
    EXPECT_EQ(names(lyndon_words(3, 2)), (std::vector<std::string>{"1", "2", "3", "12", "13", "23"}));
}

TEST(LyndonWords, MatchRotationDefinition) {
    for (std::size_t d = 1; d <= 5; ++d) {
        const auto ws = lyndon_words(d, 5);
        std::size_t i = 0;
        for (std::size_t n = 1; n <= 5; ++n) {
            const auto brute = oracle::brute_lyndon(d, n);
            ASSERT_EQ(logsig_dim(d, n), brute.size()) << "d=" << d << " n=" << n;
            for (const auto& w : brute) {
                ASSERT_LT(i, ws.size());
                EXPECT_EQ(ws[i].letters(), w);
                ++i;
            }
        }
        EXPECT_EQ(i, ws.size());
    }
}

TEST(LyndonWords, InvalidWordRejected) {
    EXPECT_THROW(LyndonWord({1, 0}), invalid_input);
    EXPECT_THROW(LyndonWord({0, 0}), invalid_input);
    EXPECT_NO_THROW(LyndonWord({0, 0, 1}));
}

TEST(LogsigDim, WittNumbers) {
    EXPECT_EQ(logsig_dim(3, 1), 3u);
    EXPECT_EQ(logsig_dim(3, 2), 3u);
    EXPECT_EQ(logsig_dim(3, 3), 8u);
    EXPECT_EQ(logsig_dim(3, 4), 18u);
    EXPECT_EQ(logsig_total_dim(3, 4), 32u);
    EXPECT_EQ(logsig_dim(4, 1), 4u);
    EXPECT_EQ(logsig_dim(4, 2), 6u);
    EXPECT_EQ(logsig_dim(4, 3), 20u);
    EXPECT_EQ(logsig_total_dim(4, 3), 30u);
    EXPECT_EQ(logsig_dim(1, 2), 0u);
}

TEST(LyndonBasis, ExpansionIsUnitriangular) {
    LyndonBasis b(3, 4);
    for (std::size_t k = 1; k <= 4; ++k) {
        for (std::size_t i = b.level_begin(k); i < b.level_end(k); ++i) {
            const auto e = b.expansion(i);
            const std::size_t own = word_offset(b.words()[i].letters(), 3);
            EXPECT_EQ(e[own], 1.0) << b.words()[i].str();
            for (std::size_t q = 0; q < own; ++q) EXPECT_EQ(e[q], 0.0) << b.words()[i].str();
        }
    }
}

TEST(LyndonBasis, ProjectExpandRoundTrip) {
    std::mt19937_64 rng(11);
    LyndonBasis b(3, 4);
    auto lg = tensor_log(path_signature(oracle::random_path(rng, 3, 9), 4));
    const auto coords = b.project(lg);
    EXPECT_LT(max_abs_diff(b.expand(coords), lg), 1e-12);
}

TEST(LogSignature, LPath) {
    auto ls = log_signature(Path{{0, 0}, {1, 0}, {1, 1}}, 2);
    ASSERT_EQ(ls.coords.size(), 3u);
    EXPECT_DOUBLE_EQ(ls.coords[0], 1.0);
    EXPECT_DOUBLE_EQ(ls.coords[1], 1.0);
    EXPECT_DOUBLE_EQ(ls.coords[2], 0.5);
}

TEST(LogSignature, StraightLineHasNoArea) {
    auto ls = log_signature(Path{{0, 0}, {1, 2}}, 2);
    EXPECT_DOUBLE_EQ(ls.coords[0], 1.0);
    EXPECT_DOUBLE_EQ(ls.coords[1], 2.0);
    EXPECT_NEAR(ls.coords[2], 0.0, 1e-15);
}

TEST(LogSignature, LengthIsWittTotal) {
    std::mt19937_64 rng(12);
    EXPECT_EQ(log_signature(oracle::random_path(rng, 3, 6), 4).coords.size(), 32u);
    EXPECT_EQ(log_signature(oracle::random_path(rng, 4, 6), 3).coords.size(), 30u);
}

TEST(LogSignature, TwelveIsHalfAntisymmetrizedSignature) {
    std::mt19937_64 rng(13);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t d = 2 + rep % 3;
        auto p = oracle::random_path(rng, d, 2 + rep % 19);
        auto s = path_signature(p, 3);
        auto ls = log_signature(p, LyndonBasis(d, 3));
        // "12" follows the d letters
        EXPECT_NEAR(ls.coords[d], 0.5 * (s[{0, 1}] - s[{1, 0}]), 1e-12);
    }
}

TEST(LogSignature, ClosedRetracedPathIsZero) {
    auto ls = log_signature(Path{{0, 0, 0}, {1, 2, 0}, {1, 2, 3}, {1, 2, 0}, {0, 0, 0}}, 4);
    for (double c : ls.coords) EXPECT_NEAR(c, 0.0, 1e-12);
}

TEST(LogSignature, DimensionMismatchThrows) {
    EXPECT_THROW(log_signature(Path{{0, 0}, {1, 1}}, LyndonBasis(3, 2)), incompatible_operands);
}
