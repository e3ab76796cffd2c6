#pragma once

// Embeddings that lift a scalar series into a path.

#include <cmath>
#include <optional>
#include <vector>

#include "pathsig/error.hpp"
#include "pathsig/signature.hpp"

namespace pathsig {

struct Series {
    std::vector<double> values;
    // Seconds, strictly increasing; indices 0..N-1 are implied when absent.
    std::optional<std::vector<double>> timestamps;

    void validate() const {
        if (values.empty()) throw invalid_input("series is empty");
        for (double v : values)
            if (!std::isfinite(v)) throw invalid_input("series values must be finite");
        if (!timestamps) return;
        if (timestamps->size() != values.size())
            throw incompatible_operands("series has " + std::to_string(values.size()) + " values but " +
                                        std::to_string(timestamps->size()) + " timestamps");
        for (std::size_t i = 0; i < timestamps->size(); ++i) {
            if (!std::isfinite((*timestamps)[i])) throw invalid_input("timestamps must be finite");
            if (i > 0 && !((*timestamps)[i] > (*timestamps)[i - 1]))
                throw invalid_input("timestamps must be strictly increasing");
        }
    }
};

// Points (t_i, v_i).
inline Path time_augment(const Series& s) {
    s.validate();
    Path p(2);
    p.reserve(s.values.size());
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        const double t = s.timestamps ? (*s.timestamps)[i] : static_cast<double>(i);
        p.push_back({t, s.values[i]});
    }
    return p;
}

// (lead, lag) interleaving: (v_1, v_1), then (v_i, v_{i-1}), (v_i, v_i) for
// each i >= 2. The lead coordinate moves first. Produces 2N-1 points.
inline Path lead_lag(const Series& s) {
    s.validate();
    const auto& v = s.values;
    Path p(2);
    p.reserve(2 * v.size() - 1);
    p.push_back({v[0], v[0]});
    for (std::size_t i = 1; i < v.size(); ++i) {
        p.push_back({v[i], v[i - 1]});
        p.push_back({v[i], v[i]});
    }
    return p;
}

// Running sums anchored at 0; output has N+1 values. Timestamps are dropped.
inline Series cumsum_basepoint(const Series& s) {
    s.validate();
    Series out;
    out.values.reserve(s.values.size() + 1);
    double acc = 0.0;
    out.values.push_back(acc);
    for (double v : s.values) {
        acc += v;
        out.values.push_back(acc);
    }
    return out;
}

}  // namespace pathsig
