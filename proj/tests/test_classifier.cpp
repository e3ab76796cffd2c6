#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "pathsig/classifier.hpp"

using namespace pathsig;

namespace {

struct Data {
    Matrix x;
    std::vector<bool> y;
};

// Gaussian features; labels from a noisy linear rule (noise = 0 gives a
// separable problem once `margin` > 0 gaps the classes).
Data make_data(std::size_t n, std::size_t p, double noise, double margin, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    Data d{Matrix(n, p), std::vector<bool>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0;
        for (std::size_t c = 0; c < p; ++c) s += (d.x(i, c) = z(rng)) * (c == 0 ? 1.0 : 0.3);
        s += noise * z(rng);
        d.y[i] = s > 0;
        d.x(i, 0) += d.y[i] ? margin : -margin;
    }
    return d;
}

}  // namespace

TEST(Bands, Boundaries) {
    EXPECT_EQ(band(Scale::WISC, 84), Band::Low);
    EXPECT_EQ(band(Scale::WISC, 85), Band::Medium);
    EXPECT_EQ(band(Scale::WISC, 115), Band::Medium);
    EXPECT_EQ(band(Scale::WISC, 116), Band::High);
    EXPECT_EQ(band(Scale::TEA, 6), Band::Low);
    EXPECT_EQ(band(Scale::TEA, 7), Band::Medium);
    EXPECT_EQ(band(Scale::CELF, 14), Band::High);
    EXPECT_EQ(band(Scale::NEPSY, 13), Band::Medium);
}

TEST(Bands, OutOfRange) {
    EXPECT_THROW(band(Scale::WISC, 39), invalid_input);
    EXPECT_THROW(band(Scale::WISC, 161), invalid_input);
    EXPECT_THROW(band(Scale::TEA, 0), invalid_input);
    EXPECT_THROW(band(Scale::CELF, 20), invalid_input);
}

TEST(Binarize, Rules) {
    EXPECT_TRUE(binarize(Scale::WISC, 105));
    EXPECT_FALSE(binarize(Scale::WISC, 120));
    EXPECT_TRUE(binarize(Scale::WISC, 70));
    EXPECT_FALSE(binarize(Scale::TEA, 10));
    EXPECT_TRUE(binarize(Scale::TEA, 5));
    EXPECT_FALSE(binarize(Scale::TEA, 15));
    EXPECT_TRUE(binarize(Scale::NEPSY, 13));
    EXPECT_FALSE(binarize(Scale::CELF, 14));
}

TEST(Scales, ParseIsCaseInsensitiveAndListsChoices) {
    EXPECT_EQ(parse_scale("nepsy"), Scale::NEPSY);
    EXPECT_EQ(parse_scale("CELF"), Scale::CELF);
    try {
        parse_scale("IQ");
        FAIL();
    } catch (const invalid_input& e) {
        EXPECT_NE(std::string(e.what()).find("WISC"), std::string::npos);
    }
}

TEST(RocAuc, Examples) {
    const std::vector<bool> y{true, true, false, false};
    const std::vector<double> good{0.9, 0.8, 0.2, 0.1}, bad{0.1, 0.2, 0.8, 0.9}, tie{0.5, 0.5};
    EXPECT_EQ(roc_auc(good, y).auc, 1.0);
    EXPECT_EQ(roc_auc(bad, y).auc, 0.0);
    EXPECT_EQ(roc_auc(tie, std::vector<bool>{true, false}).auc, 0.5);
}

TEST(RocAuc, MatchesPairwiseOracleWithTies) {
    std::mt19937_64 rng(51);
    std::uniform_int_distribution<int> m(0, 6);
    std::bernoulli_distribution lab(0.4);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> margins(5 + rep % 30);
        std::vector<bool> y(margins.size());
        for (std::size_t i = 0; i < y.size(); ++i) {
            margins[i] = m(rng);
            y[i] = lab(rng);
        }
        y[0] = true;
        y[1] = false;
        EXPECT_NEAR(roc_auc(margins, y).auc, oracle::pairwise_auc(margins, y), 1e-12);
    }
}

TEST(RocAuc, MonotoneMapInvariant) {
    std::mt19937_64 rng(52);
    std::normal_distribution<double> z;
    std::vector<double> a(40), b(40);
    std::vector<bool> y(40);
    for (std::size_t i = 0; i < 40; ++i) {
        a[i] = z(rng);
        b[i] = std::exp(a[i]) * 3 + 1;
        y[i] = z(rng) + a[i] > 0;
    }
    EXPECT_EQ(roc_auc(a, y).auc, roc_auc(b, y).auc);
}

TEST(RocAuc, CurveEndpoints) {
    auto r = roc_auc(std::vector<double>{0.3, 0.1, 0.7}, std::vector<bool>{true, false, false});
    EXPECT_EQ(r.points.front().fpr, 0.0);
    EXPECT_EQ(r.points.front().tpr, 0.0);
    EXPECT_EQ(r.points.back().fpr, 1.0);
    EXPECT_EQ(r.points.back().tpr, 1.0);
}

TEST(RocAuc, SingleClassThrows) {
    EXPECT_THROW(roc_auc(std::vector<double>{1, 2}, std::vector<bool>{true, true}), undefined_statistic);
}

TEST(Standardizer, TrainingColumnsHaveZeroMeanUnitSd) {
    auto d = make_data(50, 4, 0.5, 0, 53);
    for (std::size_t i = 0; i < 50; ++i) {
        d.x(i, 1) = 1e3 + 0.1 * d.x(i, 1);
        d.x(i, 3) = 7.0;
    }
    const auto st = Standardizer::fit(d.x);
    const auto z = st.transform(d.x);
    for (std::size_t c = 0; c < 3; ++c) {
        double m = 0, v = 0;
        for (std::size_t i = 0; i < 50; ++i) m += z(i, c);
        m /= 50;
        for (std::size_t i = 0; i < 50; ++i) v += (z(i, c) - m) * (z(i, c) - m);
        EXPECT_NEAR(m, 0.0, 1e-9);
        EXPECT_NEAR(std::sqrt(v / 50), 1.0, 1e-9);
    }
    EXPECT_EQ(st.scale[3], 1.0);
}

TEST(Svm, OneDimensionalSeparable) {
    Matrix x(4, 1);
    x.data = {0, 1, 10, 11};
    const std::vector<bool> y{false, false, true, true};
    auto model = train_linear_svm(x, y);
    auto m = model.decision(x);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(m[i] > 0, y[i]);
    EXPECT_EQ(roc_auc(m, y).auc, 1.0);
}

TEST(Svm, InputErrors) {
    Matrix x(4, 1);
    x.data = {0, 1, 2, 3};
    EXPECT_THROW(train_linear_svm(x, std::vector<bool>(4, true)), invalid_input);
    EXPECT_THROW(train_linear_svm(Matrix(0, 1), {}), invalid_input);
    EXPECT_THROW(train_linear_svm(x, std::vector<bool>{true, false, false, false}), invalid_input);
    EXPECT_THROW(train_linear_svm(x, std::vector<bool>{true, false}), incompatible_operands);
    EXPECT_THROW(train_linear_svm(x, std::vector<bool>{true, true, false, false}, {.c_reg = 0}), invalid_input);
    x.data[2] = std::nan("");
    EXPECT_THROW(train_linear_svm(x, std::vector<bool>{true, true, false, false}), invalid_input);
}

TEST(Svm, ObjectiveTraceNonIncreasing) {
    for (std::uint64_t s = 0; s < 10; ++s) {
        auto d = make_data(40, 5, 1.0, 0, 100 + s);
        auto model = train_linear_svm(d.x, d.y, {.seed = s});
        ASSERT_FALSE(model.objective_trace.empty());
        for (std::size_t i = 1; i < model.objective_trace.size(); ++i)
            EXPECT_LE(model.objective_trace[i], model.objective_trace[i - 1]);
    }
}

TEST(Svm, CloseToLongRunReference) {
    for (std::uint64_t s = 0; s < 10; ++s) {
        auto d = make_data(30, 4, 1.0, 0, 200 + s);
        SvmOptions opt{.seed = s};
        auto model = train_linear_svm(d.x, d.y, opt);
        SvmOptions longer = opt;
        longer.max_epochs *= 10;
        longer.tol = 0.0;
        auto ref = train_linear_svm(d.x, d.y, longer);
        const double a = model.objective_trace.back(), b = ref.objective_trace.back();
        EXPECT_LE(std::abs(a - b), 1e-6 * std::abs(b)) << "instance " << s;
    }
}

TEST(Svm, DuplicatedRowsKeepTestRanking) {
    Matrix x(6, 1);
    x.data = {0.0, 0.5, 2.0, 1.0, 3.0, 4.0};
    const std::vector<bool> y{false, false, false, true, true, true};
    Matrix x2(12, 1);
    std::vector<bool> y2;
    for (std::size_t i = 0; i < 12; ++i) {
        x2.data[i] = x.data[i % 6];
        y2.push_back(y[i % 6]);
    }
    auto a = train_linear_svm(x, y);
    auto b = train_linear_svm(x2, y2);
    Matrix t(20, 1);
    for (std::size_t i = 0; i < 20; ++i) t.data[i] = -2.0 + 0.4 * static_cast<double>(i);
    auto ma = a.decision(t), mb = b.decision(t);
    for (std::size_t i = 0; i + 1 < 20; ++i) {
        EXPECT_EQ(ma[i] < ma[i + 1], mb[i] < mb[i + 1]);
        EXPECT_EQ(ma[i] == ma[i + 1], mb[i] == mb[i + 1]);
    }
}

TEST(Folds, PartitionAndStratification) {
    std::mt19937_64 rng(54);
    std::bernoulli_distribution lab(0.3);
    for (std::size_t k : {2u, 3u, 4u, 5u}) {
        std::vector<bool> y(47);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = i < 10 ? i % 2 == 0 : lab(rng);
        const auto folds = stratified_folds(y, k, 7);
        ASSERT_EQ(folds.size(), y.size());
        const double n_pos = static_cast<double>(std::count(y.begin(), y.end(), true));
        const double n = static_cast<double>(y.size());
        std::vector<double> size(k, 0), pos(k, 0);
        for (std::size_t i = 0; i < y.size(); ++i) {
            ASSERT_LT(folds[i], k);
            size[folds[i]] += 1;
            pos[folds[i]] += y[i];
        }
        for (std::size_t f = 0; f < k; ++f) {
            EXPECT_LE(std::abs(pos[f] - size[f] * n_pos / n), 1.0) << "k=" << k << " fold " << f;
            EXPECT_LE(std::abs(size[f] - n / static_cast<double>(k)), 1.0);
        }
    }
}

TEST(Folds, TooFewInAClass) {
    std::vector<bool> y(20, false);
    y[0] = y[1] = y[2] = true;
    EXPECT_THROW(stratified_folds(y, 4, 0), invalid_input);
    EXPECT_NO_THROW(stratified_folds(y, 3, 0));
}

TEST(KFold, SeparableGivesPerfectFolds) {
    auto d = make_data(40, 3, 0.0, 3.0, 55);
    auto rep = kfold_cv(d.x, d.y, {.k = 4, .seed = 1});
    ASSERT_EQ(rep.per_fold_auc.size(), 4u);
    for (double a : rep.per_fold_auc) EXPECT_EQ(a, 1.0);
    EXPECT_EQ(rep.auc_mean, 1.0);
    EXPECT_EQ(rep.auc_std, 0.0);
}

TEST(KFold, IndependentLabelsNearChance) {
    std::mt19937_64 rng(56);
    std::normal_distribution<double> z;
    Matrix x(40, 5);
    for (auto& v : x.data) v = z(rng);
    std::vector<bool> y(40);
    for (std::size_t i = 0; i < 40; ++i) y[i] = i % 2 == 0;
    std::shuffle(y.begin(), y.end(), rng);
    auto rep = kfold_cv(x, y, {.k = 4, .seed = 3});
    EXPECT_GE(rep.auc_mean, 0.35);
    EXPECT_LE(rep.auc_mean, 0.65);
}

TEST(KFold, DeterministicAndMeanIsFoldAverage) {
    auto d = make_data(48, 6, 1.0, 0, 57);
    auto a = kfold_cv(d.x, d.y, {.seed = 11});
    auto b = kfold_cv(d.x, d.y, {.seed = 11});
    EXPECT_TRUE(a == b);
    double s = 0;
    for (double v : a.per_fold_auc) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
        s += v;
    }
    EXPECT_DOUBLE_EQ(a.auc_mean, s / 4);
}

TEST(Demographics, GenderFlipKeepsFoldAucs) {
    std::mt19937_64 rng(58);
    std::normal_distribution<double> age(10, 3), score(100, 15);
    std::bernoulli_distribution male(0.6);
    std::vector<ScoreRecord> recs(60);
    for (std::size_t i = 0; i < recs.size(); ++i) {
        recs[i].subject_id = "S" + std::to_string(i);
        recs[i].age_years = age(rng);
        recs[i].gender = male(rng) ? Gender::male : Gender::female;
        recs[i].wisc = static_cast<int>(std::clamp(std::round(score(rng) + 3 * (recs[i].gender == Gender::male)), 40.0, 160.0));
    }
    auto flipped = recs;
    for (auto& r : flipped) r.gender = r.gender == Gender::male ? Gender::female : Gender::male;
    auto a = demographics_baseline(recs, Scale::WISC, {.seed = 2});
    auto b = demographics_baseline(flipped, Scale::WISC, {.seed = 2});
    ASSERT_EQ(a.per_fold_auc.size(), b.per_fold_auc.size());
    for (std::size_t f = 0; f < a.per_fold_auc.size(); ++f) EXPECT_NEAR(a.per_fold_auc[f], b.per_fold_auc[f], 1e-12);
    EXPECT_EQ(a.feature_set, "demographics");
    EXPECT_EQ(a.scale, "WISC");
}

TEST(Demographics, AgeDrivenLabelsAreLearned) {
    std::mt19937_64 rng(59);
    std::normal_distribution<double> age(10, 3);
    std::vector<ScoreRecord> recs(60);
    std::vector<double> ages;
    for (auto& r : recs) ages.push_back(r.age_years = age(rng));
    std::vector<double> sorted = ages;
    std::sort(sorted.begin(), sorted.end());
    const double median = 0.5 * (sorted[29] + sorted[30]);
    for (auto& r : recs) r.wisc = r.age_years > median ? 125 : 95;  // WISC True iff not High
    auto rep = demographics_baseline(recs, Scale::WISC, {.seed = 4});
    EXPECT_GE(rep.auc_mean, 0.9);
}
