#pragma once

// Score bands, binary labels, and a linear soft-margin SVM evaluated with
// stratified k-fold cross-validation and ROC AUC.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pathsig/error.hpp"

namespace pathsig {

enum class Scale { WISC, TEA, NEPSY, CELF };

inline constexpr std::array<Scale, 4> all_scales{Scale::WISC, Scale::TEA, Scale::NEPSY, Scale::CELF};

inline std::string_view to_string(Scale s) {
    switch (s) {
        case Scale::WISC: return "WISC";
        case Scale::TEA: return "TEA";
        case Scale::NEPSY: return "NEPSY";
        case Scale::CELF: return "CELF";
    }
    return "?";
}

inline Scale parse_scale(std::string_view name) {
    std::string up(name);
    for (char& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    for (Scale s : all_scales)
        if (up == to_string(s)) return s;
    throw invalid_input("unknown scale '" + std::string(name) + "' (valid scales: WISC, TEA, NEPSY, CELF)");
}

struct BandRule {
    double mean;
    double sd;
    int min_score;
    int max_score;
};

inline constexpr BandRule band_rule(Scale s) {
    return s == Scale::WISC ? BandRule{100.0, 15.0, 40, 160} : BandRule{10.0, 3.0, 1, 19};
}

enum class Band { Low, Medium, High };

inline std::string_view to_string(Band b) {
    switch (b) {
        case Band::Low: return "Low";
        case Band::Medium: return "Medium";
        case Band::High: return "High";
    }
    return "?";
}

// Low below mean - sd, High above mean + sd; the boundaries are Medium.
inline Band band(Scale scale, double score) {
    const BandRule r = band_rule(scale);
    if (!(score >= r.min_score && score <= r.max_score))
        throw invalid_input(std::string(to_string(scale)) + " score " + std::to_string(score) + " outside [" +
                            std::to_string(r.min_score) + ", " + std::to_string(r.max_score) + "]");
    if (score < r.mean - r.sd) return Band::Low;
    if (score > r.mean + r.sd) return Band::High;
    return Band::Medium;
}

// TEA: positive iff Low. Other scales: positive iff Low or Medium.
inline bool binarize(Scale scale, double score) {
    const Band b = band(scale, score);
    if (scale == Scale::TEA) return b == Band::Low;
    return b != Band::High;
}

enum class Gender { male, female };

struct ScoreRecord {
    std::string subject_id;
    int wisc = 100;
    int tea = 10;
    int nepsy = 10;
    int celf = 10;
    double age_years = 10.0;
    Gender gender = Gender::male;

    int score(Scale s) const {
        switch (s) {
            case Scale::WISC: return wisc;
            case Scale::TEA: return tea;
            case Scale::NEPSY: return nepsy;
            case Scale::CELF: return celf;
        }
        return 0;
    }

    void validate() const {
        for (Scale s : all_scales) band(s, score(s));
        if (!std::isfinite(age_years) || age_years < 0) throw invalid_input("invalid age for subject " + subject_id);
    }
};

// Dense row-major design matrix.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

    Matrix select_rows(std::span<const std::size_t> idx) const {
        Matrix m(idx.size(), cols);
        for (std::size_t i = 0; i < idx.size(); ++i) std::copy_n(row(idx[i]).begin(), cols, m.data.begin() + i * cols);
        return m;
    }
};

// z-scoring with population standard deviation; constant columns get scale 1.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;

    static Standardizer fit(const Matrix& x) {
        Standardizer s;
        s.mean.assign(x.cols, 0.0);
        s.scale.assign(x.cols, 1.0);
        const double n = static_cast<double>(x.rows);
        for (std::size_t c = 0; c < x.cols; ++c) {
            double m = 0;
            for (std::size_t r = 0; r < x.rows; ++r) m += x(r, c);
            m /= n;
            double v = 0;
            for (std::size_t r = 0; r < x.rows; ++r) v += (x(r, c) - m) * (x(r, c) - m);
            const double sd = std::sqrt(v / n);
            s.mean[c] = m;
            s.scale[c] = sd > 0.0 ? sd : 1.0;
        }
        return s;
    }

    void transform_into(std::span<const double> in, std::span<double> out) const {
        for (std::size_t c = 0; c < in.size(); ++c) out[c] = (in[c] - mean[c]) / scale[c];
    }

    Matrix transform(const Matrix& x) const {
        Matrix z(x.rows, x.cols);
        for (std::size_t r = 0; r < x.rows; ++r)
            transform_into(x.row(r), std::span<double>(z.data.data() + r * x.cols, x.cols));
        return z;
    }
};

struct SvmOptions {
    double c_reg = 1.0;
    std::size_t max_epochs = 2000;
    // stop when the projected-gradient spread over an epoch drops below this
    double tol = 1e-10;
    std::uint64_t seed = 0;
};

struct LinearModel {
    Standardizer standardizer;
    std::vector<double> weights;  // in standardized feature space
    double bias = 0.0;
    // Primal objective of the returned iterate after each epoch.
    std::vector<double> objective_trace;
    std::size_t epochs = 0;
    bool converged = false;

    double decision(std::span<const double> x) const {
        double s = bias;
        for (std::size_t c = 0; c < weights.size(); ++c) s += weights[c] * (x[c] - standardizer.mean[c]) / standardizer.scale[c];
        return s;
    }

    std::vector<double> decision(const Matrix& x) const {
        std::vector<double> out(x.rows);
        for (std::size_t r = 0; r < x.rows; ++r) out[r] = decision(x.row(r));
        return out;
    }
};

// 0.5 * (|w|^2 + b^2) + C * sum_i max(0, 1 - y_i (w.z_i + b)) on standardized
// rows z. The bias is treated as the weight of a constant unit feature and is
// regularized with the rest.
inline double svm_primal_objective(const Matrix& z, const std::vector<bool>& y, std::span<const double> w, double b,
                                   double c_reg) {
    double reg = b * b;
    for (double v : w) reg += v * v;
    double loss = 0.0;
    for (std::size_t r = 0; r < z.rows; ++r) {
        double m = b;
        auto row = z.row(r);
        for (std::size_t c = 0; c < z.cols; ++c) m += w[c] * row[c];
        const double yi = y[r] ? 1.0 : -1.0;
        loss += std::max(0.0, 1.0 - yi * m);
    }
    return 0.5 * reg + c_reg * loss;
}

// Hinge-loss SVM trained by dual coordinate descent over a seeded random
// permutation each epoch. Dual steps do not guarantee a monotone primal, so
// the best primal iterate seen at an epoch boundary is the one kept.
inline LinearModel train_linear_svm(const Matrix& x, const std::vector<bool>& y, const SvmOptions& opt = {}) {
    if (x.rows == 0) throw invalid_input("train_linear_svm: no training rows");
    if (y.size() != x.rows) throw incompatible_operands("train_linear_svm: label count does not match rows");
    if (!(opt.c_reg > 0.0) || !std::isfinite(opt.c_reg)) throw invalid_input("train_linear_svm: c_reg must be positive");
    for (double v : x.data)
        if (!std::isfinite(v)) throw invalid_input("train_linear_svm: non-finite feature value");
    const auto n_pos = static_cast<std::size_t>(std::count(y.begin(), y.end(), true));
    if (n_pos == 0 || n_pos == y.size()) throw invalid_input("train_linear_svm: labels contain a single class");
    if (n_pos < 2 || y.size() - n_pos < 2) throw invalid_input("train_linear_svm: need at least 2 samples per class");

    LinearModel model;
    model.standardizer = Standardizer::fit(x);
    const Matrix z = model.standardizer.transform(x);
    const std::size_t n = z.rows;
    const std::size_t p = z.cols;
    const double C = opt.c_reg;

    std::vector<double> qii(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 1.0;  // bias feature
        for (double v : z.row(i)) s += v * v;
        qii[i] = s;
    }

    std::vector<double> alpha(n, 0.0);
    std::vector<double> w(p, 0.0);
    double b = 0.0;
    std::vector<double> best_w = w;
    double best_b = b;
    double best_obj = svm_primal_objective(z, y, w, b, C);

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::seed_seq seq{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32), 0x5f3a11u};
    std::mt19937_64 rng(seq);

    for (std::size_t epoch = 0; epoch < opt.max_epochs; ++epoch) {
        std::shuffle(perm.begin(), perm.end(), rng);
        double pg_max = -std::numeric_limits<double>::infinity();
        double pg_min = std::numeric_limits<double>::infinity();
        for (std::size_t i : perm) {
            const double yi = y[i] ? 1.0 : -1.0;
            auto zi = z.row(i);
            double m = b;
            for (std::size_t c = 0; c < p; ++c) m += w[c] * zi[c];
            const double g = yi * m - 1.0;
            double pg = g;
            if (alpha[i] == 0.0) pg = std::min(g, 0.0);
            else if (alpha[i] == C) pg = std::max(g, 0.0);
            pg_max = std::max(pg_max, pg);
            pg_min = std::min(pg_min, pg);
            if (pg == 0.0) continue;
            const double a_new = std::clamp(alpha[i] - g / qii[i], 0.0, C);
            const double step = (a_new - alpha[i]) * yi;
            alpha[i] = a_new;
            for (std::size_t c = 0; c < p; ++c) w[c] += step * zi[c];
            b += step;
        }
        const double obj = svm_primal_objective(z, y, w, b, C);
        if (obj <= best_obj) {
            best_obj = obj;
            best_w = w;
            best_b = b;
        }
        model.objective_trace.push_back(best_obj);
        model.epochs = epoch + 1;
        if (pg_max - pg_min < opt.tol) {
            model.converged = true;
            break;
        }
    }
    model.weights = std::move(best_w);
    model.bias = best_b;
    return model;
}

struct RocPoint {
    double fpr;
    double tpr;
};

struct RocResult {
    double auc = 0.5;
    std::vector<RocPoint> points;  // from (0,0) to (1,1), one step per distinct margin
};

// Trapezoidal area under the ROC steps; tied margins contribute one diagonal
// step, which counts each tied positive/negative pair as 1/2.
inline RocResult roc_auc(std::span<const double> margins, const std::vector<bool>& labels) {
    if (margins.size() != labels.size()) throw incompatible_operands("roc_auc: margins and labels differ in length");
    const auto n_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
    const std::size_t n_neg = labels.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) throw undefined_statistic("roc_auc: labels contain a single class");

    std::vector<std::size_t> order(margins.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return margins[a] > margins[b]; });

    RocResult res;
    res.points.push_back({0.0, 0.0});
    std::size_t tp = 0, fp = 0;
    double area2 = 0.0;  // twice the area in units of (pairs)
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        std::size_t dtp = 0, dfp = 0;
        while (j < order.size() && margins[order[j]] == margins[order[i]]) {
            (labels[order[j]] ? dtp : dfp)++;
            ++j;
        }
        area2 += static_cast<double>(dfp) * static_cast<double>(2 * tp + dtp);
        tp += dtp;
        fp += dfp;
        res.points.push_back({static_cast<double>(fp) / static_cast<double>(n_neg),
                              static_cast<double>(tp) / static_cast<double>(n_pos)});
        i = j;
    }
    res.auc = area2 / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
    return res;
}

struct CvOptions {
    std::size_t k = 4;
    std::uint64_t seed = 0;
    SvmOptions svm{};
};

struct CvReport {
    std::string scale;
    std::string feature_set;
    std::vector<double> per_fold_auc;
    double auc_mean = 0.0;
    double auc_std = 0.0;  // population std over folds
    std::vector<std::vector<RocPoint>> roc_points;
    std::vector<std::size_t> fold_of;  // fold index per sample

    friend bool operator==(const CvReport& a, const CvReport& b) {
        auto same_roc = [](const auto& x, const auto& y) {
            if (x.size() != y.size()) return false;
            for (std::size_t f = 0; f < x.size(); ++f) {
                if (x[f].size() != y[f].size()) return false;
                for (std::size_t i = 0; i < x[f].size(); ++i)
                    if (x[f][i].fpr != y[f][i].fpr || x[f][i].tpr != y[f][i].tpr) return false;
            }
            return true;
        };
        return a.scale == b.scale && a.feature_set == b.feature_set && a.per_fold_auc == b.per_fold_auc &&
               a.auc_mean == b.auc_mean && a.auc_std == b.auc_std && a.fold_of == b.fold_of &&
               same_roc(a.roc_points, b.roc_points);
    }
};

// Each class is shuffled with its own seeded stream and dealt round-robin;
// the negatives continue the deal where the positives stopped so fold sizes
// differ by at most one.
inline std::vector<std::size_t> stratified_folds(const std::vector<bool>& y, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw invalid_input("stratified_folds: k must be at least 2");
    std::vector<std::size_t> fold(y.size(), 0);
    std::size_t next = 0;
    for (int cls = 1; cls >= 0; --cls) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < y.size(); ++i)
            if (y[i] == static_cast<bool>(cls)) members.push_back(i);
        if (members.size() < k)
            throw invalid_input("stratified_folds: class " + std::string(cls ? "True" : "False") + " has " +
                                std::to_string(members.size()) + " samples, fewer than k=" + std::to_string(k));
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(cls), 0xf01du};
        std::mt19937_64 rng(seq);
        std::shuffle(members.begin(), members.end(), rng);
        for (std::size_t m : members) {
            fold[m] = next;
            next = (next + 1) % k;
        }
    }
    return fold;
}

inline CvReport kfold_cv(const Matrix& x, const std::vector<bool>& y, const CvOptions& opt = {}) {
    if (y.size() != x.rows) throw incompatible_operands("kfold_cv: label count does not match rows");
    CvReport rep;
    rep.fold_of = stratified_folds(y, opt.k, opt.seed);
    for (std::size_t f = 0; f < opt.k; ++f) {
        std::vector<std::size_t> train, test;
        for (std::size_t i = 0; i < y.size(); ++i) (rep.fold_of[i] == f ? test : train).push_back(i);
        std::vector<bool> ytr, yte;
        for (auto i : train) ytr.push_back(y[i]);
        for (auto i : test) yte.push_back(y[i]);
        const LinearModel model = train_linear_svm(x.select_rows(train), ytr, opt.svm);
        const auto margins = model.decision(x.select_rows(test));
        const RocResult roc = roc_auc(margins, yte);
        rep.per_fold_auc.push_back(roc.auc);
        rep.roc_points.push_back(roc.points);
    }
    const double k = static_cast<double>(opt.k);
    rep.auc_mean = std::accumulate(rep.per_fold_auc.begin(), rep.per_fold_auc.end(), 0.0) / k;
    double v = 0.0;
    for (double a : rep.per_fold_auc) v += (a - rep.auc_mean) * (a - rep.auc_mean);
    rep.auc_std = std::sqrt(v / k);
    return rep;
}

// Age and gender (male 0, female 1) as the only features.
inline CvReport demographics_baseline(std::span<const ScoreRecord> records, Scale scale, const CvOptions& opt = {}) {
    Matrix x(records.size(), 2);
    std::vector<bool> y(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        x(i, 0) = records[i].age_years;
        x(i, 1) = records[i].gender == Gender::female ? 1.0 : 0.0;
        y[i] = binarize(scale, records[i].score(scale));
    }
    CvReport rep = kfold_cv(x, y, opt);
    rep.scale = to_string(scale);
    rep.feature_set = "demographics";
    return rep;
}

}  // namespace pathsig
