#pragma once

// Spearman rank correlation and subject-level bootstrap of per-feature
// correlations against a target score.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "pathsig/error.hpp"

namespace pathsig {

// 1-based ranks; tied values share the average of the ranks they span.
inline std::vector<double> average_ranks(std::span<const double> v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && v[order[j]] == v[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + 1 + j);  // mean of i+1 .. j
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
        i = j;
    }
    return ranks;
}

inline bool is_constant(std::span<const double> v) {
    return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>{}) == v.end();
}

// Pearson correlation, clamped to [-1, 1]. Both inputs must be non-constant.
inline double pearson(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

inline double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw incompatible_operands("spearman: vectors have lengths " + std::to_string(x.size()) + " and " +
                                    std::to_string(y.size()));
    if (x.size() < 3) throw invalid_input("spearman: need at least 3 observations");
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw invalid_input("spearman: non-finite value");
    if (is_constant(x) || is_constant(y)) throw undefined_statistic("spearman: correlation undefined for a constant vector");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return pearson(rx, ry);
}

// Subjects x features, row-major.
struct FeatureMatrix {
    std::vector<std::string> subject_ids;
    std::vector<std::string> feature_names;
    std::vector<double> values;

    std::size_t rows() const noexcept { return subject_ids.size(); }
    std::size_t cols() const noexcept { return feature_names.size(); }
    double& operator()(std::size_t r, std::size_t c) { return values[r * cols() + c]; }
    double operator()(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }

    std::vector<double> column(std::size_t c) const {
        std::vector<double> out(rows());
        for (std::size_t r = 0; r < rows(); ++r) out[r] = (*this)(r, c);
        return out;
    }

    std::span<const double> row(std::size_t r) const { return {values.data() + r * cols(), cols()}; }

    void validate() const {
        if (values.size() != rows() * cols()) throw incompatible_operands("feature matrix has the wrong number of values");
    }
};

struct BootstrapSummary {
    std::string feature_name;
    double point_rho = 0.0;
    double boot_mean = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t n_boot = 0;
    std::size_t n_skipped = 0;  // replicas where either resampled vector was constant
    bool significant = false;
    // false when the correlation is undefined on the full sample (constant
    // feature); all statistics are then NaN.
    bool defined = true;
};

struct BootstrapOptions {
    std::size_t n_boot = 1000;
    double ci_level = 0.95;
    std::uint64_t seed = 0;
    unsigned n_threads = 1;
};

namespace detail {

// Resampled subject indices for one replica; depends only on (seed, replica).
inline void draw_resample(std::uint64_t seed, std::uint64_t replica, std::size_t n, std::vector<std::size_t>& out) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(replica), static_cast<std::uint32_t>(replica >> 32),
                      0x5eedb007u};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    out.resize(n);
    for (auto& i : out) i = pick(rng);
}

// Linear interpolation between order statistics.
inline double quantile_sorted(std::span<const double> sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

template <class Fn>
void parallel_for(std::size_t n, unsigned n_threads, Fn&& fn) {
    n_threads = std::max(1u, std::min<unsigned>(n_threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (n_threads == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += n_threads) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace detail

// Percentile-bootstrap summary of spearman(feature, target) for every
// feature column, sorted by |boot_mean| descending. The same resampled
// subject set is used for every feature within a replica.
inline std::vector<BootstrapSummary> bootstrap_correlations(const FeatureMatrix& features,
                                                            std::span<const double> target,
                                                            const BootstrapOptions& opt = {}) {
    features.validate();
    const std::size_t n = features.rows();
    const std::size_t p = features.cols();
    if (opt.n_boot < 1) throw invalid_input("bootstrap: n_boot must be at least 1");
    if (!(opt.ci_level > 0.0 && opt.ci_level < 1.0)) throw invalid_input("bootstrap: ci_level must be in (0, 1)");
    if (target.size() != n)
        throw incompatible_operands("bootstrap: target has " + std::to_string(target.size()) + " entries for " +
                                    std::to_string(n) + " subjects");
    if (n < 3) throw invalid_input("bootstrap: need at least 3 subjects");
    if (is_constant(target)) throw undefined_statistic("bootstrap: target is constant");

    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::vector<double>> columns(p);
    for (std::size_t c = 0; c < p; ++c) columns[c] = features.column(c);

    // replica-major storage so each replica writes a disjoint block
    std::vector<double> rhos(opt.n_boot * p, nan);
    detail::parallel_for(opt.n_boot, opt.n_threads, [&](std::size_t r) {
        std::vector<std::size_t> idx;
        detail::draw_resample(opt.seed, r, n, idx);
        std::vector<double> ty(n), tx(n);
        for (std::size_t i = 0; i < n; ++i) ty[i] = target[idx[i]];
        if (is_constant(ty)) return;
        const auto ry = average_ranks(ty);
        for (std::size_t c = 0; c < p; ++c) {
            for (std::size_t i = 0; i < n; ++i) tx[i] = columns[c][idx[i]];
            if (is_constant(tx)) continue;
            rhos[r * p + c] = pearson(average_ranks(tx), ry);
        }
    });

    std::vector<BootstrapSummary> out;
    out.reserve(p);
    const double alpha = 1.0 - opt.ci_level;
    for (std::size_t c = 0; c < p; ++c) {
        BootstrapSummary s;
        s.feature_name = features.feature_names[c];
        s.n_boot = opt.n_boot;
        if (is_constant(columns[c])) {
            s.defined = false;
            s.point_rho = s.boot_mean = s.ci_low = s.ci_high = nan;
            s.n_skipped = opt.n_boot;
            out.push_back(std::move(s));
            continue;
        }
        s.point_rho = spearman(columns[c], target);
        std::vector<double> valid;
        valid.reserve(opt.n_boot);
        for (std::size_t r = 0; r < opt.n_boot; ++r) {
            const double v = rhos[r * p + c];
            if (!std::isnan(v)) valid.push_back(v);
        }
        s.n_skipped = opt.n_boot - valid.size();
        if (valid.empty()) {
            s.defined = false;
            s.boot_mean = s.ci_low = s.ci_high = nan;
            out.push_back(std::move(s));
            continue;
        }
        // summed in replica order, independent of thread scheduling
        double sum = 0.0;
        for (double v : valid) sum += v;
        s.boot_mean = sum / static_cast<double>(valid.size());
        std::sort(valid.begin(), valid.end());
        s.ci_low = detail::quantile_sorted(valid, alpha / 2.0);
        s.ci_high = detail::quantile_sorted(valid, 1.0 - alpha / 2.0);
        // A heavily skewed replica distribution can put the mean outside the
        // percentile interval; widen to keep ci_low <= boot_mean <= ci_high.
        s.ci_low = std::min(s.ci_low, s.boot_mean);
        s.ci_high = std::max(s.ci_high, s.boot_mean);
        s.significant = s.ci_low > 0.0 || s.ci_high < 0.0;
        out.push_back(std::move(s));
    }

    std::stable_sort(out.begin(), out.end(), [](const BootstrapSummary& a, const BootstrapSummary& b) {
        if (a.defined != b.defined) return a.defined;
        if (!a.defined) return false;
        return std::abs(a.boot_mean) > std::abs(b.boot_mean);
    });
    return out;
}

}  // namespace pathsig
