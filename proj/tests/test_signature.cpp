#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "pathsig/signature.hpp"

using namespace pathsig;

namespace {

double seg_tol(const TruncatedTensor& ref, double tol) { return tol * std::max(1.0, oracle::max_abs(ref)); }

}  // namespace

TEST(Tensor, LevelSizesAreDPowK) {
    TruncatedTensor t(3, 4);
    for (std::size_t k = 0; k <= 4; ++k) EXPECT_EQ(t.level(k).size(), ipow(3, k));
    EXPECT_EQ(t.coefficients().size(), 1u + 3 + 9 + 27 + 81);
}

TEST(Tensor, RejectsZeroShape) {
    EXPECT_THROW(TruncatedTensor(0, 2), invalid_input);
    EXPECT_THROW(TruncatedTensor(2, 0), invalid_input);
}

TEST(SegmentSignature, TwoDimensionalExample) {
    const double v[] = {1.0, 2.0};
    auto s = segment_signature(v, 2);
    EXPECT_EQ(s.scalar(), 1.0);
    EXPECT_EQ(s[{0}], 1.0);
    EXPECT_EQ(s[{1}], 2.0);
    EXPECT_EQ((s[{0, 0}]), 0.5);
    EXPECT_EQ((s[{0, 1}]), 1.0);
    EXPECT_EQ((s[{1, 0}]), 1.0);
    EXPECT_EQ((s[{1, 1}]), 2.0);
}

TEST(SegmentSignature, ZeroDisplacementIsIdentity) {
    const double v[] = {0.0, 0.0, 0.0};
    EXPECT_EQ(segment_signature(v, 4), TruncatedTensor::identity(3, 4));
}

TEST(SegmentSignature, OneLetterPowers) {
    const double v[] = {3.0};
    auto s = segment_signature(v, 3);
    EXPECT_DOUBLE_EQ(s.level(1)[0], 3.0);
    EXPECT_DOUBLE_EQ(s.level(2)[0], 4.5);
    EXPECT_DOUBLE_EQ(s.level(3)[0], 4.5);
}

TEST(ChenConcat, LShapedPath) {
    const double e1[] = {1.0, 0.0}, e2[] = {0.0, 1.0};
    auto s = chen_concat(segment_signature(e1, 2), segment_signature(e2, 2));
    EXPECT_EQ(s[{0}], 1.0);
    EXPECT_EQ(s[{1}], 1.0);
    EXPECT_EQ((s[{0, 1}]), 1.0);
    EXPECT_EQ((s[{1, 0}]), 0.0);
}

TEST(ChenConcat, IdentityIsNeutral) {
    std::mt19937_64 rng(1);
    auto t = path_signature(oracle::random_path(rng, 3, 7), 4);
    EXPECT_EQ(chen_concat(t, TruncatedTensor::identity(3, 4)), t);
    EXPECT_EQ(chen_concat(TruncatedTensor::identity(3, 4), t), t);
}

TEST(ChenConcat, HalvesOfASegment) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> z;
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> v(4), h(4);
        for (std::size_t i = 0; i < 4; ++i) {
            v[i] = z(rng);
            h[i] = v[i] / 2;
        }
        auto half = segment_signature(h, 4);
        auto whole = segment_signature(v, 4);
        EXPECT_LT(max_abs_diff(chen_concat(half, half), whole), 1e-12 * std::max(1.0, oracle::max_abs(whole)));
    }
}

TEST(ChenConcat, ShapeMismatchThrows) {
    EXPECT_THROW(chen_concat(TruncatedTensor(2, 2), TruncatedTensor(3, 2)), incompatible_operands);
    EXPECT_THROW(chen_concat(TruncatedTensor(2, 2), TruncatedTensor(2, 3)), incompatible_operands);
}

TEST(PathSignature, LPathOracle) {
    Path p{{0, 0}, {1, 0}, {1, 1}};
    auto s = path_signature(p, 2);
    EXPECT_EQ(s[{0}], 1.0);
    EXPECT_EQ(s[{1}], 1.0);
    EXPECT_EQ((s[{0, 1}]), 1.0);
    EXPECT_EQ((s[{1, 0}]), 0.0);
}

TEST(PathSignature, SinglePointIsIdentity) {
    Path p{{0.3, -2.0, 5.0}};
    EXPECT_EQ(path_signature(p, 3), TruncatedTensor::identity(3, 3));
}

TEST(PathSignature, EmptyPathThrows) { EXPECT_THROW(path_signature(Path(2), 2), invalid_input); }

TEST(PathSignature, TwoPointsEqualSegmentExactly) {
    Path p{{0.25, 1.0, -3.0}, {1.5, -0.75, 2.0}};
    const double v[] = {1.25, -1.75, 5.0};
    EXPECT_EQ(path_signature(p, 4), segment_signature(v, 4));
}

TEST(PathSignature, CollinearMidpointInsertion) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t d = 1 + rep % 4;
        auto p = oracle::random_path(rng, d, 2 + rep % 10);
        const std::size_t seg = rep % (p.size() - 1);
        const double a = u(rng);
        Path q(d);
        for (std::size_t i = 0; i < p.size(); ++i) {
            q.push_back(p[i]);
            if (i == seg) {
                std::vector<double> mid(d);
                for (std::size_t c = 0; c < d; ++c) mid[c] = p[i][c] + a * (p[i + 1][c] - p[i][c]);
                q.push_back(mid);
            }
        }
        auto ref = path_signature(p, 4);
        EXPECT_LT(max_abs_diff(path_signature(q, 4), ref), seg_tol(ref, 1e-12));
    }
}

TEST(PathSignature, MatchesNumericalIntegration) {
    std::mt19937_64 rng(4);
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t d = 1 + rep % 4;
        auto p = oracle::random_path(rng, d, 2 + rep);
        auto ref = oracle::integrate_signature(p, 4, 400);
        EXPECT_LT(max_abs_diff(path_signature(p, 4), ref), 1e-6 * std::max(1.0, oracle::max_abs(ref)));
    }
}

TEST(PathSignature, LevelOneIsDisplacement) {
    std::mt19937_64 rng(5);
    auto p = oracle::random_path(rng, 3, 15);
    auto s = path_signature(p, 3);
    for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(s.level(1)[c], p[14][c] - p[0][c]);
}

TEST(PathSignature, DyadicTranslationIsExact) {
    std::mt19937_64 rng(6);
    auto p = oracle::random_dyadic_path(rng, 3, 12);
    Path q(3);
    for (std::size_t i = 0; i < p.size(); ++i) q.push_back({p[i][0] + 5.5, p[i][1] - 0.25, p[i][2] + 1024.0});
    EXPECT_EQ(path_signature(p, 4), path_signature(q, 4));
}

TEST(TensorExpLog, LogOfIdentityIsZero) {
    EXPECT_EQ(tensor_log(TruncatedTensor::identity(2, 4)), TruncatedTensor(2, 4));
}

TEST(TensorExpLog, LogOfSegmentIsDisplacement) {
    const double v[] = {0.7, -1.3, 2.1};
    auto lg = tensor_log(segment_signature(v, 4));
    for (std::size_t c = 0; c < 3; ++c) EXPECT_NEAR(lg.level(1)[c], v[c], 1e-15);
    for (std::size_t k = 2; k <= 4; ++k)
        for (double x : lg.level(k)) EXPECT_NEAR(x, 0.0, 1e-12);
}

TEST(TensorExpLog, RoundTripOnRandomSignature) {
    std::mt19937_64 rng(7);
    auto s = path_signature(oracle::random_path(rng, 3, 10), 4);
    EXPECT_LT(max_abs_diff(tensor_exp(tensor_log(s)), s), 1e-12);
    auto lg = tensor_log(s);
    EXPECT_LT(max_abs_diff(tensor_log(tensor_exp(lg)), lg), 1e-12);
}

TEST(TensorExpLog, WrongScalarThrows) {
    EXPECT_THROW(tensor_log(TruncatedTensor(2, 2)), invalid_input);
    EXPECT_THROW(tensor_exp(TruncatedTensor::identity(2, 2)), invalid_input);
}

TEST(PathType, RejectsNonFiniteAndWrongWidth) {
    Path p(2);
    EXPECT_THROW(p.push_back({1.0, std::nan("")}), invalid_input);
    EXPECT_THROW(p.push_back({1.0, 2.0, 3.0}), incompatible_operands);
    EXPECT_THROW(Path(2, {1.0, 2.0, 3.0}), incompatible_operands);
}
