#pragma once

// Conversation and head-movement paths built from diarized speech turns and
// 2D head tracks, and the named feature vectors derived from them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "pathsig/error.hpp"
#include "pathsig/lyndon.hpp"
#include "pathsig/signature.hpp"

namespace pathsig {

enum class Role { patient, clinician };

inline std::string_view to_string(Role r) { return r == Role::patient ? "patient" : "clinician"; }

inline Role parse_role(std::string_view s) {
    if (s == "patient") return Role::patient;
    if (s == "clinician") return Role::clinician;
    throw invalid_input("unknown role '" + std::string(s) + "' (expected patient or clinician)");
}

struct SpeechSegment {
    double start_s = 0.0;
    double end_s = 0.0;
    Role speaker = Role::patient;
};

struct FeatureVector {
    std::vector<std::string> names;
    std::vector<double> values;

    void push(std::string name, double value) {
        names.push_back(std::move(name));
        values.push_back(value);
    }

    void append(const FeatureVector& o) {
        names.insert(names.end(), o.names.begin(), o.names.end());
        values.insert(values.end(), o.values.begin(), o.values.end());
    }

    std::size_t size() const noexcept { return values.size(); }

    double at(std::string_view name) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return values[i];
        throw invalid_input("no feature named '" + std::string(name) + "'");
    }

    void validate() const {
        if (names.size() != values.size()) throw incompatible_operands("feature names/values length mismatch");
        std::unordered_set<std::string_view> seen;
        for (const auto& n : names)
            if (!seen.insert(n).second) throw invalid_input("duplicate feature name '" + n + "'");
        for (std::size_t i = 0; i < values.size(); ++i)
            if (!std::isfinite(values[i])) throw invalid_input("feature '" + names[i] + "' is not finite");
    }
};

// Axes of the conversation path.
enum class TurnChannel : std::size_t { silence = 0, clinician = 1, patient = 2 };

struct TurnInterval {
    TurnChannel channel;
    double duration_s;
};

namespace detail {

inline std::string describe(const SpeechSegment& s) {
    return std::string(to_string(s.speaker)) + " [" + std::to_string(s.start_s) + ", " +
           std::to_string(s.end_s) + "]";
}

}  // namespace detail

// Speech and silence intervals covering [0, window_s], in time order.
// Segments are clipped to the window; gaps (leading, between, trailing) become
// silence. Zero-length intervals are not emitted.
inline std::vector<TurnInterval> turn_intervals(std::vector<SpeechSegment> segments, double window_s) {
    if (!(window_s > 0.0) || !std::isfinite(window_s)) throw invalid_input("speech window must be positive");
    for (const auto& s : segments) {
        if (!std::isfinite(s.start_s) || !std::isfinite(s.end_s) || s.start_s < 0.0 || !(s.start_s < s.end_s))
            throw invalid_input("invalid speech segment " + detail::describe(s));
    }
    std::stable_sort(segments.begin(), segments.end(),
                     [](const SpeechSegment& a, const SpeechSegment& b) { return a.start_s < b.start_s; });
    for (std::size_t i = 1; i < segments.size(); ++i) {
        if (segments[i].start_s < segments[i - 1].end_s)
            throw invalid_input("overlapping speech segments: " + detail::describe(segments[i - 1]) + " and " +
                                detail::describe(segments[i]));
    }

    std::vector<TurnInterval> out;
    double cursor = 0.0;
    for (const auto& s : segments) {
        if (s.start_s >= window_s) break;
        if (s.start_s > cursor) out.push_back({TurnChannel::silence, s.start_s - cursor});
        const double end = std::min(s.end_s, window_s);
        out.push_back({s.speaker == Role::patient ? TurnChannel::patient : TurnChannel::clinician,
                       end - s.start_s});
        cursor = end;
    }
    if (cursor < window_s) out.push_back({TurnChannel::silence, window_s - cursor});
    return out;
}

// Cumulative (silence, clinician, patient) seconds; starts at the origin and
// moves along one axis per interval.
inline Path build_turn_path(const std::vector<SpeechSegment>& segments, double window_s) {
    const auto intervals = turn_intervals(segments, window_s);
    Path p(3);
    p.reserve(intervals.size() + 1);
    double acc[3] = {0.0, 0.0, 0.0};
    p.push_back(std::span<const double>(acc, 3));
    for (const auto& iv : intervals) {
        acc[static_cast<std::size_t>(iv.channel)] += iv.duration_s;
        p.push_back(std::span<const double>(acc, 3));
    }
    return p;
}

// The 16 turn-taking statistics. Counts and durations are over the clipped
// window; mean/std use the population formula and are 0 for a speaker with
// no turns.
inline FeatureVector speech_stats(const std::vector<SpeechSegment>& segments, double window_s) {
    const auto intervals = turn_intervals(segments, window_s);
    struct Acc {
        double count = 0, total = 0, sum_sq = 0;
    } acc[3];
    for (const auto& iv : intervals) {
        auto& a = acc[static_cast<std::size_t>(iv.channel)];
        a.count += 1;
        a.total += iv.duration_s;
        a.sum_sq += iv.duration_s * iv.duration_s;
    }
    const Acc& s = acc[0];
    const Acc& c = acc[1];
    const Acc& p = acc[2];
    const double n_turns = s.count + c.count + p.count;
    const double span = s.total + c.total + p.total;
    auto mean = [](const Acc& a) { return a.count > 0 ? a.total / a.count : 0.0; };
    auto stdev = [&](const Acc& a) {
        if (a.count == 0) return 0.0;
        const double m = mean(a);
        return std::sqrt(std::max(0.0, a.sum_sq / a.count - m * m));
    };

    FeatureVector fv;
    fv.push("p_cnt", p.count);
    fv.push("c_cnt", c.count);
    fv.push("s_cnt", s.count);
    fv.push("p_crel", p.count / n_turns);
    fv.push("c_crel", c.count / n_turns);
    fv.push("s_crel", s.count / n_turns);
    fv.push("p_t", p.total);
    fv.push("c_t", c.total);
    fv.push("s_t", s.total);
    fv.push("p_r", p.total / span);
    fv.push("c_r", c.total / span);
    fv.push("s_r", s.total / span);
    fv.push("p_mean", mean(p));
    fv.push("p_std", stdev(p));
    fv.push("c_mean", mean(c));
    fv.push("c_std", stdev(c));
    return fv;
}

// Log-signature coordinates named <prefix>_L<level>_<word>, optionally
// without the level-1 terms.
inline FeatureVector named_logsig(const Path& path, const LyndonBasis& basis, std::string_view prefix,
                                  bool drop_level1 = false) {
    const LogSignature ls = log_signature(path, basis);
    FeatureVector fv;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const auto& w = basis.words()[i];
        if (drop_level1 && w.size() == 1) continue;
        fv.push(std::string(prefix) + "_L" + std::to_string(w.size()) + "_" + w.str(), ls.coords[i]);
    }
    return fv;
}

inline FeatureVector speech_logsig_features(const Path& turn_path, std::size_t depth = 4, bool drop_level1 = false) {
    return named_logsig(turn_path, LyndonBasis(3, depth), "speech_path", drop_level1);
}

struct TrackSample {
    std::int64_t frame = 0;
    double x = 0.0;
    double y = 0.0;
};

struct HeadTrack {
    Role person = Role::patient;
    std::vector<TrackSample> samples;

    void validate() const {
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const auto& s = samples[i];
            if (s.frame < 0) throw invalid_input("negative frame index in " + std::string(to_string(person)) + " track");
            if (!std::isfinite(s.x) || !std::isfinite(s.y))
                throw invalid_input("non-finite coordinate in " + std::string(to_string(person)) + " track");
            if (i > 0 && s.frame <= samples[i - 1].frame)
                throw invalid_input("frame indices not strictly increasing in " + std::string(to_string(person)) +
                                    " track at frame " + std::to_string(s.frame));
        }
    }
};

struct MovementPaths {
    std::vector<std::int64_t> frames;  // aligned frame indices
    Path patient_xyt = Path(3);        // (x_p, y_p, frame / fps)
    Path joint = Path(4);              // (x_p, y_p, x_c, y_c)
};

// Aligns the two tracks on their common frames below max_frames.
inline MovementPaths build_movement_paths(const HeadTrack& patient, const HeadTrack& clinician,
                                          std::int64_t max_frames = 10000, double fps = 15.0) {
    if (max_frames <= 0) throw invalid_input("max_frames must be positive");
    if (!(fps > 0.0) || !std::isfinite(fps)) throw invalid_input("fps must be positive");
    if (patient.samples.empty() || clinician.samples.empty()) throw invalid_input("head track is empty");
    patient.validate();
    clinician.validate();

    MovementPaths mp;
    auto ip = patient.samples.begin();
    auto ic = clinician.samples.begin();
    while (ip != patient.samples.end() && ic != clinician.samples.end()) {
        if (ip->frame >= max_frames || ic->frame >= max_frames) break;
        if (ip->frame < ic->frame) {
            ++ip;
        } else if (ic->frame < ip->frame) {
            ++ic;
        } else {
            mp.frames.push_back(ip->frame);
            mp.patient_xyt.push_back({ip->x, ip->y, static_cast<double>(ip->frame) / fps});
            mp.joint.push_back({ip->x, ip->y, ic->x, ic->y});
            ++ip;
            ++ic;
        }
    }
    if (mp.frames.empty()) throw invalid_input("patient and clinician tracks share no frame below max_frames");
    return mp;
}

// x_p_std, y_p_std over the aligned patient positions, then the log-signature
// of the (x, y, t) patient path and of the joint 4D path.
inline FeatureVector movement_features(const MovementPaths& paths, const LyndonBasis& basis3,
                                       const LyndonBasis& basis4) {
    const auto& p = paths.patient_xyt;
    const double n = static_cast<double>(p.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        mx += p[i][0];
        my += p[i][1];
    }
    mx /= n;
    my /= n;
    double vx = 0, vy = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        vx += (p[i][0] - mx) * (p[i][0] - mx);
        vy += (p[i][1] - my) * (p[i][1] - my);
    }
    FeatureVector fv;
    fv.push("x_p_std", std::sqrt(vx / n));
    fv.push("y_p_std", std::sqrt(vy / n));
    fv.append(named_logsig(paths.patient_xyt, basis3, "video_p"));
    fv.append(named_logsig(paths.joint, basis4, "video_joint"));
    return fv;
}

inline FeatureVector movement_features(const MovementPaths& paths, std::size_t depth = 3) {
    return movement_features(paths, LyndonBasis(3, depth), LyndonBasis(4, depth));
}

struct FeatureConfig {
    double speech_window_s = 2400.0;
    std::int64_t movement_max_frames = 10000;
    double fps = 15.0;
    std::size_t speech_logsig_depth = 4;
    std::size_t movement_logsig_depth = 3;
    bool drop_level1 = false;
};

// Full per-session feature vector; holds the Lyndon bases so they are built
// once. Immutable after construction, safe to share across threads.
class SessionFeatureExtractor {
public:
    explicit SessionFeatureExtractor(FeatureConfig cfg = {})
        : cfg_(cfg),
          speech_basis_(3, cfg.speech_logsig_depth),
          video_basis3_(3, cfg.movement_logsig_depth),
          video_basis4_(4, cfg.movement_logsig_depth) {}

    const FeatureConfig& config() const noexcept { return cfg_; }

    FeatureVector operator()(const std::vector<SpeechSegment>& segments, const HeadTrack& patient,
                             const HeadTrack& clinician) const {
        FeatureVector fv = speech_stats(segments, cfg_.speech_window_s);
        fv.append(named_logsig(build_turn_path(segments, cfg_.speech_window_s), speech_basis_, "speech_path",
                               cfg_.drop_level1));
        const auto mp = build_movement_paths(patient, clinician, cfg_.movement_max_frames, cfg_.fps);
        fv.append(movement_features(mp, video_basis3_, video_basis4_));
        return fv;
    }

    std::size_t feature_count() const {
        std::size_t n = 16 + speech_basis_.size() + 2 + video_basis3_.size() + video_basis4_.size();
        if (cfg_.drop_level1) n -= 3;
        return n;
    }

private:
    FeatureConfig cfg_;
    LyndonBasis speech_basis_;
    LyndonBasis video_basis3_;
    LyndonBasis video_basis4_;
};

}  // namespace pathsig
