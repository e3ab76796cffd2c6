#pragma once

// Lyndon words, the Lyndon bracket basis of the free Lie algebra and
// log-signature coordinates on that basis.

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pathsig/error.hpp"
#include "pathsig/signature.hpp"

namespace pathsig {

// True iff `w` is non-empty and strictly smaller than each of its proper
// rotations.
inline bool is_lyndon(std::span<const Letter> w) {
    const std::size_t n = w.size();
    if (n == 0) return false;
    for (std::size_t r = 1; r < n; ++r) {
        // compare w against rotation starting at r
        for (std::size_t i = 0; i < n; ++i) {
            const Letter a = w[i];
            const Letter b = w[(r + i) % n];
            if (a < b) break;
            if (a > b) return false;
            if (i + 1 == n) return false;  // equal to a rotation: periodic
        }
    }
    return true;
}

class LyndonWord {
public:
    explicit LyndonWord(Word letters) : letters_(std::move(letters)) {
        if (!is_lyndon(letters_)) throw invalid_input("not a Lyndon word: " + word_to_string(letters_));
    }

    const Word& letters() const noexcept { return letters_; }
    std::size_t size() const noexcept { return letters_.size(); }
    std::string str() const { return word_to_string(letters_); }

    friend bool operator==(const LyndonWord&, const LyndonWord&) = default;
    // (length, lexicographic)
    friend bool operator<(const LyndonWord& a, const LyndonWord& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a.letters_ < b.letters_;
    }

private:
    Word letters_;
};

// Every Lyndon word over {0..d-1} of length <= max_depth, sorted by
// (length, lexicographic). Duval's generation order is lexicographic across
// all lengths; a stable partition by length gives the required order.
inline std::vector<LyndonWord> lyndon_words(std::size_t d, std::size_t max_depth) {
    if (d == 0 || max_depth == 0) throw invalid_input("lyndon_words: d and max_depth must be positive");
    std::vector<Word> found;
    Word w{0};
    while (!w.empty()) {
        found.push_back(w);
        const std::size_t m = w.size();
        while (w.size() < max_depth) w.push_back(w[w.size() - m]);
        while (!w.empty() && w.back() == d - 1) w.pop_back();
        if (!w.empty()) ++w.back();
    }
    std::stable_sort(found.begin(), found.end(),
                     [](const Word& a, const Word& b) { return a.size() < b.size(); });
    std::vector<LyndonWord> out;
    out.reserve(found.size());
    for (auto& f : found) out.emplace_back(std::move(f));
    return out;
}

namespace detail {

inline int mobius(std::uint64_t n) {
    int result = 1;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            n /= p;
            if (n % p == 0) return 0;
            result = -result;
        }
    }
    if (n > 1) result = -result;
    return result;
}

}  // namespace detail

// Witt dimension L(d, n): number of Lyndon words of length n over d letters.
inline std::uint64_t logsig_dim(std::uint64_t d, std::uint64_t n) {
    if (d == 0 || n == 0) throw invalid_input("logsig_dim: d and n must be positive");
    std::int64_t total = 0;
    for (std::uint64_t k = 1; k <= n; ++k) {
        if (n % k != 0) continue;
        std::int64_t pw = 1;
        for (std::uint64_t i = 0; i < k; ++i) pw *= static_cast<std::int64_t>(d);
        total += detail::mobius(n / k) * pw;
    }
    return static_cast<std::uint64_t>(total / static_cast<std::int64_t>(n));
}

inline std::uint64_t logsig_total_dim(std::uint64_t d, std::uint64_t depth) {
    std::uint64_t s = 0;
    for (std::uint64_t n = 1; n <= depth; ++n) s += logsig_dim(d, n);
    return s;
}

// Lyndon words up to a depth together with the tensor expansion of their
// standard bracketings. Build once per (d, depth) and reuse.
class LyndonBasis {
public:
    LyndonBasis(std::size_t d, std::size_t depth) : d_(d), depth_(depth), words_(lyndon_words(d, depth)) {
        std::map<Word, std::size_t> index;
        expansions_.reserve(words_.size());
        for (std::size_t i = 0; i < words_.size(); ++i) {
            const Word& w = words_[i].letters();
            index.emplace(w, i);
            if (w.size() == 1) {
                std::vector<double> e(d_, 0.0);
                e[w[0]] = 1.0;
                expansions_.push_back(std::move(e));
                split_.push_back(0);
                continue;
            }
            // Standard factorization w = uv, v the longest proper Lyndon suffix.
            std::size_t cut = 1;
            while (!is_lyndon(std::span<const Letter>(w).subspan(cut))) ++cut;
            split_.push_back(cut);
            const auto& pu = expansions_[index.at(Word(w.begin(), w.begin() + cut))];
            const auto& pv = expansions_[index.at(Word(w.begin() + cut, w.end()))];
            const std::size_t nu = pu.size();
            const std::size_t nv = pv.size();
            std::vector<double> e(nu * nv, 0.0);
            // [P(u), P(v)] = P(u)P(v) - P(v)P(u)
            for (std::size_t a = 0; a < nu; ++a) {
                if (pu[a] == 0.0) continue;
                for (std::size_t b = 0; b < nv; ++b) {
                    if (pv[b] == 0.0) continue;
                    e[a * nv + b] += pu[a] * pv[b];
                    e[b * nu + a] -= pv[b] * pu[a];
                }
            }
            expansions_.push_back(std::move(e));
        }
        level_begin_.assign(depth_ + 2, 0);
        for (const auto& w : words_) ++level_begin_[w.size() + 1];
        for (std::size_t k = 1; k < level_begin_.size(); ++k) level_begin_[k] += level_begin_[k - 1];
    }

    std::size_t alphabet_size() const noexcept { return d_; }
    std::size_t depth() const noexcept { return depth_; }
    std::size_t size() const noexcept { return words_.size(); }
    const std::vector<LyndonWord>& words() const noexcept { return words_; }

    // Coefficients of the bracketing of words()[i] over all words of its length.
    std::span<const double> expansion(std::size_t i) const { return expansions_.at(i); }

    // Length of the left factor in the standard factorization (0 for letters).
    std::size_t factor_split(std::size_t i) const { return split_.at(i); }

    // Index range [begin, end) of the words of length k.
    std::size_t level_begin(std::size_t k) const { return level_begin_.at(k); }
    std::size_t level_end(std::size_t k) const { return level_begin_.at(k + 1); }

    // Coordinates of a Lie element (given as a tensor with zero scalar part)
    // on the bracket basis. Each bracketing expands to its own word plus
    // lexicographically larger words only, so the system is unitriangular and
    // is solved by substitution in lexicographic order.
    std::vector<double> project(const TruncatedTensor& lie) const {
        if (lie.alphabet_size() != d_ || lie.depth() != depth_)
            throw incompatible_operands("project: tensor shape does not match the Lyndon basis");
        std::vector<double> coords(words_.size(), 0.0);
        for (std::size_t k = 1; k <= depth_; ++k) {
            auto lvl = lie.level(k);
            for (std::size_t i = level_begin(k); i < level_end(k); ++i) {
                const std::size_t off = word_offset(words_[i].letters(), d_);
                double c = lvl[off];
                for (std::size_t j = level_begin(k); j < i; ++j) c -= coords[j] * expansions_[j][off];
                coords[i] = c;
            }
        }
        return coords;
    }

    // Inverse of project: expands coordinates back to a tensor.
    TruncatedTensor expand(std::span<const double> coords) const {
        if (coords.size() != words_.size())
            throw incompatible_operands("expand: coordinate count does not match the Lyndon basis");
        TruncatedTensor t(d_, depth_);
        for (std::size_t i = 0; i < words_.size(); ++i) {
            auto lvl = t.level(words_[i].size());
            const auto& e = expansions_[i];
            for (std::size_t q = 0; q < e.size(); ++q) lvl[q] += coords[i] * e[q];
        }
        return t;
    }

private:
    std::size_t d_;
    std::size_t depth_;
    std::vector<LyndonWord> words_;
    std::vector<std::vector<double>> expansions_;
    std::vector<std::size_t> split_;
    std::vector<std::size_t> level_begin_;
};

struct LogSignature {
    std::size_t alphabet_size = 0;
    std::size_t depth = 0;
    // One coordinate per Lyndon word, (length, lexicographic) order.
    std::vector<double> coords;
};

inline LogSignature log_signature(const Path& path, const LyndonBasis& basis) {
    if (path.dim() != basis.alphabet_size())
        throw incompatible_operands("log_signature: path dimension does not match the basis alphabet");
    const TruncatedTensor lg = tensor_log(path_signature(path, basis.depth()));
    return {basis.alphabet_size(), basis.depth(), basis.project(lg)};
}

inline LogSignature log_signature(const Path& path, std::size_t depth) {
    return log_signature(path, LyndonBasis(path.dim(), depth));
}

}  // namespace pathsig
