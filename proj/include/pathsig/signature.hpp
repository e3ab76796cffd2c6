#pragma once

// Truncated tensor algebra over a d-letter alphabet and signatures of
// piecewise-linear paths.
//
// Words are sequences of 0-based letters. A word (i_1, ..., i_k) is stored at
// offset i_1*d^(k-1) + ... + i_k inside level k, so offset order within a
// level coincides with lexicographic word order.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "pathsig/error.hpp"

namespace pathsig {

using Letter = std::size_t;
using Word = std::vector<Letter>;

inline std::size_t ipow(std::size_t base, std::size_t exp) {
    std::size_t r = 1;
    while (exp--) r *= base;
    return r;
}

// Offset of `word` inside its level.
inline std::size_t word_offset(std::span<const Letter> word, std::size_t alphabet) {
    std::size_t off = 0;
    for (Letter l : word) off = off * alphabet + l;
    return off;
}

// Renders a word with 1-based letters, e.g. {0, 1} -> "12".
inline std::string word_to_string(std::span<const Letter> word) {
    std::string s;
    for (Letter l : word) s += std::to_string(l + 1);
    return s;
}

class TruncatedTensor {
public:
    // Zero tensor.
    TruncatedTensor(std::size_t alphabet_size, std::size_t depth)
        : alphabet_(alphabet_size), depth_(depth) {
        if (alphabet_size == 0) throw invalid_input("alphabet size must be positive");
        if (depth == 0) throw invalid_input("truncation depth must be positive");
        offsets_.reserve(depth + 2);
        std::size_t total = 0;
        for (std::size_t k = 0; k <= depth; ++k) {
            offsets_.push_back(total);
            total += ipow(alphabet_size, k);
        }
        offsets_.push_back(total);
        coeffs_.assign(total, 0.0);
    }

    static TruncatedTensor identity(std::size_t alphabet_size, std::size_t depth) {
        TruncatedTensor t(alphabet_size, depth);
        t.coeffs_[0] = 1.0;
        return t;
    }

    std::size_t alphabet_size() const noexcept { return alphabet_; }
    std::size_t depth() const noexcept { return depth_; }

    std::span<double> level(std::size_t k) {
        return {coeffs_.data() + offsets_.at(k), offsets_[k + 1] - offsets_[k]};
    }
    std::span<const double> level(std::size_t k) const {
        return {coeffs_.data() + offsets_.at(k), offsets_[k + 1] - offsets_[k]};
    }

    double& scalar() noexcept { return coeffs_[0]; }
    double scalar() const noexcept { return coeffs_[0]; }

    double operator[](std::span<const Letter> word) const {
        return level(word.size())[word_offset(word, alphabet_)];
    }
    double operator[](std::initializer_list<Letter> word) const {
        return (*this)[std::span<const Letter>(word.begin(), word.size())];
    }

    // All coefficients, level 0 first.
    std::span<const double> coefficients() const noexcept { return coeffs_; }
    std::span<double> coefficients() noexcept { return coeffs_; }

    bool same_shape(const TruncatedTensor& o) const noexcept {
        return alphabet_ == o.alphabet_ && depth_ == o.depth_;
    }

    TruncatedTensor& operator+=(const TruncatedTensor& o) {
        require_same_shape(o);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
        return *this;
    }
    TruncatedTensor& operator-=(const TruncatedTensor& o) {
        require_same_shape(o);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
        return *this;
    }
    TruncatedTensor& operator*=(double s) noexcept {
        for (double& c : coeffs_) c *= s;
        return *this;
    }

    friend bool operator==(const TruncatedTensor&, const TruncatedTensor&) = default;

    void require_same_shape(const TruncatedTensor& o) const {
        if (!same_shape(o))
            throw incompatible_operands(
                "tensor shapes differ: (d=" + std::to_string(alphabet_) + ", M=" +
                std::to_string(depth_) + ") vs (d=" + std::to_string(o.alphabet_) +
                ", M=" + std::to_string(o.depth_) + ")");
    }

private:
    std::size_t alphabet_;
    std::size_t depth_;
    std::vector<std::size_t> offsets_;
    std::vector<double> coeffs_;
};

inline double max_abs_diff(const TruncatedTensor& a, const TruncatedTensor& b) {
    a.require_same_shape(b);
    double m = 0.0;
    auto ca = a.coefficients();
    auto cb = b.coefficients();
    for (std::size_t i = 0; i < ca.size(); ++i) m = std::max(m, std::abs(ca[i] - cb[i]));
    return m;
}

// A sequence of N >= 1 points in R^d, read as the piecewise-linear
// interpolant through them.
class Path {
public:
    explicit Path(std::size_t dim) : dim_(dim) {
        if (dim == 0) throw invalid_input("path dimension must be positive");
    }

    Path(std::size_t dim, std::vector<double> flat_points) : Path(dim) {
        if (flat_points.size() % dim != 0)
            throw incompatible_operands("flat point buffer is not a multiple of the dimension");
        for (double v : flat_points)
            if (!std::isfinite(v)) throw invalid_input("path coordinates must be finite");
        data_ = std::move(flat_points);
    }

    Path(std::initializer_list<std::initializer_list<double>> points)
        : Path(points.size() ? points.begin()->size() : 1) {
        for (const auto& p : points) push_back(std::span<const double>(p.begin(), p.size()));
    }

    void push_back(std::span<const double> point) {
        if (point.size() != dim_)
            throw incompatible_operands("point has " + std::to_string(point.size()) +
                                        " coordinates, path dimension is " + std::to_string(dim_));
        for (double v : point)
            if (!std::isfinite(v)) throw invalid_input("path coordinates must be finite");
        data_.insert(data_.end(), point.begin(), point.end());
    }
    void push_back(std::initializer_list<double> point) {
        push_back(std::span<const double>(point.begin(), point.size()));
    }

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return data_.size() / dim_; }
    bool empty() const noexcept { return data_.empty(); }

    std::span<const double> operator[](std::size_t i) const {
        return {data_.data() + i * dim_, dim_};
    }
    std::span<const double> flat() const noexcept { return data_; }
    void reserve(std::size_t n_points) { data_.reserve(n_points * dim_); }

private:
    std::size_t dim_;
    std::vector<double> data_;
};

// Signature of a single linear segment: level k holds v^{(x)k} / k!.
inline TruncatedTensor segment_signature(std::span<const double> displacement, std::size_t depth) {
    for (double v : displacement)
        if (!std::isfinite(v)) throw invalid_input("displacement must be finite");
    const std::size_t d = displacement.size();
    TruncatedTensor t = TruncatedTensor::identity(d, depth);
    for (std::size_t k = 1; k <= depth; ++k) {
        auto prev = t.level(k - 1);
        auto cur = t.level(k);
        const double inv_k = 1.0 / static_cast<double>(k);
        for (std::size_t p = 0; p < prev.size(); ++p)
            for (std::size_t i = 0; i < d; ++i) cur[p * d + i] = prev[p] * displacement[i] * inv_k;
    }
    return t;
}

// Truncated tensor product a (x) b.
inline TruncatedTensor chen_concat(const TruncatedTensor& a, const TruncatedTensor& b) {
    a.require_same_shape(b);
    const std::size_t d = a.alphabet_size();
    const std::size_t depth = a.depth();
    TruncatedTensor out(d, depth);
    for (std::size_t k = 0; k <= depth; ++k) {
        auto dst = out.level(k);
        for (std::size_t j = 0; j <= k; ++j) {
            auto left = a.level(j);
            auto right = b.level(k - j);
            for (std::size_t p = 0; p < left.size(); ++p) {
                const double lp = left[p];
                if (lp == 0.0) continue;
                double* row = dst.data() + p * right.size();
                for (std::size_t s = 0; s < right.size(); ++s) row[s] += lp * right[s];
            }
        }
    }
    return out;
}

inline TruncatedTensor operator*(const TruncatedTensor& a, const TruncatedTensor& b) {
    return chen_concat(a, b);
}

namespace detail {

// sig <- sig (x) exp(delta), evaluated top level first with a Horner scheme
// so lower levels are still the old values when they are read.
inline void multiply_by_segment(TruncatedTensor& sig, std::span<const double> delta,
                                std::vector<double>& scratch_a, std::vector<double>& scratch_b) {
    const std::size_t d = sig.alphabet_size();
    const std::size_t depth = sig.depth();
    for (std::size_t k = depth; k >= 1; --k) {
        // acc = sig_0 (scalar)
        scratch_a.assign(1, sig.scalar());
        for (std::size_t j = 1; j <= k; ++j) {
            const double scale = 1.0 / static_cast<double>(k - j + 1);
            scratch_b.resize(scratch_a.size() * d);
            for (std::size_t p = 0; p < scratch_a.size(); ++p) {
                const double v = scratch_a[p] * scale;
                for (std::size_t i = 0; i < d; ++i) scratch_b[p * d + i] = v * delta[i];
            }
            auto lvl = sig.level(j);
            if (j < k) {
                for (std::size_t q = 0; q < scratch_b.size(); ++q) scratch_b[q] += lvl[q];
            } else {
                for (std::size_t q = 0; q < scratch_b.size(); ++q) lvl[q] += scratch_b[q];
            }
            std::swap(scratch_a, scratch_b);
        }
    }
}

}  // namespace detail

// Signature of the piecewise-linear interpolant of `path`, truncated at
// `depth`. Equal to the left fold of chen_concat over segment signatures.
inline TruncatedTensor path_signature(const Path& path, std::size_t depth) {
    if (path.empty()) throw invalid_input("path_signature: path has no points");
    const std::size_t d = path.dim();
    TruncatedTensor sig = TruncatedTensor::identity(d, depth);
    if (path.size() == 1) return sig;

    std::vector<double> delta(d);
    auto diff = [&](std::size_t i) {
        auto a = path[i - 1];
        auto b = path[i];
        for (std::size_t c = 0; c < d; ++c) delta[c] = b[c] - a[c];
    };

    diff(1);
    sig = segment_signature(delta, depth);
    std::vector<double> sa, sb;
    for (std::size_t i = 2; i < path.size(); ++i) {
        diff(i);
        detail::multiply_by_segment(sig, delta, sa, sb);
    }
    // Level 1 is the total increment; take it straight from the endpoints
    // instead of a running sum of differences.
    auto lvl1 = sig.level(1);
    auto first = path[0];
    auto last = path[path.size() - 1];
    for (std::size_t c = 0; c < d; ++c) lvl1[c] = last[c] - first[c];
    return sig;
}

// Truncated exponential of an element with zero scalar part.
inline TruncatedTensor tensor_exp(const TruncatedTensor& t) {
    if (t.scalar() != 0.0)
        throw invalid_input("tensor_exp: level-0 coefficient must be 0 (Lie-like input)");
    const std::size_t d = t.alphabet_size();
    const std::size_t depth = t.depth();
    TruncatedTensor result = TruncatedTensor::identity(d, depth);
    TruncatedTensor power = TruncatedTensor::identity(d, depth);
    for (std::size_t n = 1; n <= depth; ++n) {
        power = chen_concat(power, t);
        power *= 1.0 / static_cast<double>(n);
        result += power;
    }
    return result;
}

// Truncated logarithm of an element with unit scalar part.
inline TruncatedTensor tensor_log(const TruncatedTensor& t) {
    if (t.scalar() != 1.0)
        throw invalid_input("tensor_log: level-0 coefficient must be 1 (group-like input)");
    const std::size_t d = t.alphabet_size();
    const std::size_t depth = t.depth();
    TruncatedTensor x = t;
    x.scalar() = 0.0;
    TruncatedTensor result(d, depth);
    TruncatedTensor power = TruncatedTensor::identity(d, depth);
    for (std::size_t n = 1; n <= depth; ++n) {
        power = chen_concat(power, x);
        TruncatedTensor term = power;
        term *= ((n % 2 == 1) ? 1.0 : -1.0) / static_cast<double>(n);
        result += term;
    }
    return result;
}

}  // namespace pathsig
