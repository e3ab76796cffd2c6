#pragma once

// Synthetic sessions with a planted dependence between interaction dynamics
// and test scores. This is a validation instrument for the pipeline; the
// generative model is made up and carries no clinical meaning.
//
// Each subject has a latent ability a ~ N(0, 1). Scores on every scale are an
// affine function of a plus independent noise. The speech and movement
// processes depend on effect_size * a:
//   - patient turns get longer and more frequent,
//   - response latencies get shorter,
//   - the patient's head jitters less and follows the clinician more closely.
// Demographics are drawn from their own stream, independent of a.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "pathsig/classifier.hpp"
#include "pathsig/error.hpp"
#include "pathsig/interaction.hpp"

namespace pathsig {

struct CohortSpec {
    std::size_t n_subjects = 40;
    std::uint64_t seed = 0;
    double effect_size = 1.0;
    double session_s = 2400.0;
    double fps = 15.0;
    std::int64_t n_frames = 10000;
    // noise sd relative to the ability loading (both in scale-sd units)
    double score_noise_sd = 0.3;
    // Mean offsets in scale-sd units (WISC, TEA, NEPSY, CELF). They skew the
    // bands the way the clinical cohort is skewed (many High on WISC, NEPSY
    // and CELF, many Low on TEA) while keeping the marginals near the norms.
    std::array<double, 4> score_offset_sd{0.5, -0.35, 0.35, 0.35};

    // generator parameters
    double clinician_turn_median_s = 4.0;
    double patient_turn_median_s = 2.0;
    double latency_median_s = 1.2;
    double frame_drop_prob = 0.02;

    void validate() const {
        if (n_subjects < 8) throw invalid_input("cohort needs at least 8 subjects");
        if (!(effect_size >= 0.0) || !std::isfinite(effect_size)) throw invalid_input("effect_size must be >= 0");
        if (!(session_s > 0.0) || !std::isfinite(session_s)) throw invalid_input("session_s must be positive");
        if (!(fps > 0.0) || !std::isfinite(fps)) throw invalid_input("fps must be positive");
        if (n_frames <= 0) throw invalid_input("n_frames must be positive");
        if (!(score_noise_sd >= 0.0) || !std::isfinite(score_noise_sd)) throw invalid_input("score_noise_sd must be >= 0");
        if (!(clinician_turn_median_s > 0 && patient_turn_median_s > 0 && latency_median_s > 0))
            throw invalid_input("turn and latency medians must be positive");
        if (!(frame_drop_prob >= 0.0 && frame_drop_prob < 1.0)) throw invalid_input("frame_drop_prob must be in [0, 1)");
    }
};

struct SubjectSession {
    std::string subject_id;
    double ability = 0.0;  // latent, not written to disk
    std::vector<SpeechSegment> segments;
    HeadTrack patient{Role::patient, {}};
    HeadTrack clinician{Role::clinician, {}};
    ScoreRecord scores;
};

namespace detail {

enum class Stream : std::uint32_t { ability = 1, demographics = 2, speech = 3, movement = 4 };

inline std::mt19937_64 subject_rng(std::uint64_t seed, std::size_t subject, Stream s) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(subject), static_cast<std::uint32_t>(s)};
    return std::mt19937_64(seq);
}

inline double round_to(double v, double quantum) { return std::round(v / quantum) * quantum; }

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline std::vector<SpeechSegment> synth_speech(const CohortSpec& spec, double ability, std::mt19937_64& rng) {
    const double drive = spec.effect_size * ability;
    std::normal_distribution<double> z(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto lognormal = [&](double median, double sigma, double floor) {
        return std::max(floor, median * std::exp(sigma * z(rng)));
    };
    const double p_respond = logistic(1.0 + 0.5 * drive);
    const double patient_median = spec.patient_turn_median_s * std::exp(0.3 * drive);
    const double latency_median = spec.latency_median_s * std::exp(-0.25 * drive);

    std::vector<SpeechSegment> out;
    auto emit = [&](double start, double end, Role who) {
        start = round_to(start, 1e-3);
        end = std::min(round_to(end, 1e-3), spec.session_s);
        if (start < spec.session_s && start < end) out.push_back({start, end, who});
    };

    double t = 2.0 * u(rng);
    while (t < spec.session_s) {
        const double dc = lognormal(spec.clinician_turn_median_s, 0.6, 0.2);
        emit(t, t + dc, Role::clinician);
        t += dc + lognormal(latency_median, 0.5, 0.05);
        if (u(rng) < p_respond) {
            const double dp = lognormal(patient_median, 0.6, 0.2);
            emit(t, t + dp, Role::patient);
            t += dp + lognormal(1.0, 0.5, 0.05);
        }
    }
    return out;
}

inline void synth_movement(const CohortSpec& spec, double ability, std::mt19937_64& rng, HeadTrack& patient,
                           HeadTrack& clinician) {
    const double drive = spec.effect_size * ability;
    std::normal_distribution<double> z(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    const double cx0 = 350.0 + 100.0 * u(rng), cy0 = 180.0 + 40.0 * u(rng);
    const double px0 = 150.0 + 100.0 * u(rng), py0 = 200.0 + 60.0 * u(rng);
    const double theta = 0.02;
    const double clinician_sd = 5.0;
    const double patient_sd = 6.0 * std::exp(-0.35 * drive);
    const double coupling = 0.5 * (1.0 + std::tanh(0.5 * drive));
    constexpr std::size_t lag = 5;
    const double kick = std::sqrt(2.0 * theta);

    const auto n = static_cast<std::size_t>(spec.n_frames);
    std::vector<double> cdx(n), cdy(n);
    double cx = 0, cy = 0, px = 0, py = 0;
    patient.samples.clear();
    clinician.samples.clear();
    for (std::size_t f = 0; f < n; ++f) {
        cx = cx * (1.0 - theta) + clinician_sd * kick * z(rng);
        cy = cy * (1.0 - theta) + clinician_sd * kick * z(rng);
        px = px * (1.0 - theta) + patient_sd * kick * z(rng);
        py = py * (1.0 - theta) + patient_sd * kick * z(rng);
        cdx[f] = cx;
        cdy[f] = cy;
        const double fx = f >= lag ? cdx[f - lag] : 0.0;
        const double fy = f >= lag ? cdy[f - lag] : 0.0;
        const double pxo = px0 + px + coupling * fx + 0.5 * z(rng);
        const double pyo = py0 + py + coupling * fy + 0.5 * z(rng);
        const double cxo = cx0 + cx + 0.5 * z(rng);
        const double cyo = cy0 + cy + 0.5 * z(rng);
        const auto frame = static_cast<std::int64_t>(f);
        if (u(rng) >= spec.frame_drop_prob) patient.samples.push_back({frame, round_to(pxo, 0.01), round_to(pyo, 0.01)});
        if (u(rng) >= spec.frame_drop_prob)
            clinician.samples.push_back({frame, round_to(cxo, 0.01), round_to(cyo, 0.01)});
    }
}

}  // namespace detail

inline std::string subject_id_for(std::size_t index) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "S%04zu", index + 1);
    return buf;
}

inline SubjectSession generate_subject(const CohortSpec& spec, std::size_t index) {
    SubjectSession s;
    s.subject_id = subject_id_for(index);

    auto arng = detail::subject_rng(spec.seed, index, detail::Stream::ability);
    std::normal_distribution<double> z(0.0, 1.0);
    s.ability = z(arng);
    const double norm = std::sqrt(1.0 + spec.score_noise_sd * spec.score_noise_sd);
    auto draw_score = [&](Scale scale) {
        const BandRule r = band_rule(scale);
        const double offset = spec.score_offset_sd[static_cast<std::size_t>(scale)];
        const double latent = offset + (s.ability + spec.score_noise_sd * z(arng)) / norm;
        const double raw = std::round(r.mean + r.sd * latent);
        return static_cast<int>(std::clamp(raw, static_cast<double>(r.min_score), static_cast<double>(r.max_score)));
    };
    s.scores.subject_id = s.subject_id;
    s.scores.wisc = draw_score(Scale::WISC);
    s.scores.tea = draw_score(Scale::TEA);
    s.scores.nepsy = draw_score(Scale::NEPSY);
    s.scores.celf = draw_score(Scale::CELF);

    auto drng = detail::subject_rng(spec.seed, index, detail::Stream::demographics);
    std::normal_distribution<double> age(10.0, 3.0);
    std::bernoulli_distribution male(0.63);
    s.scores.age_years = detail::round_to(std::clamp(age(drng), 4.0, 18.0), 0.1);
    s.scores.gender = male(drng) ? Gender::male : Gender::female;

    auto srng = detail::subject_rng(spec.seed, index, detail::Stream::speech);
    s.segments = detail::synth_speech(spec, s.ability, srng);

    auto mrng = detail::subject_rng(spec.seed, index, detail::Stream::movement);
    detail::synth_movement(spec, s.ability, mrng, s.patient, s.clinician);
    return s;
}

inline std::vector<SubjectSession> generate_cohort(const CohortSpec& spec) {
    spec.validate();
    std::vector<SubjectSession> out;
    out.reserve(spec.n_subjects);
    for (std::size_t i = 0; i < spec.n_subjects; ++i) out.push_back(generate_subject(spec, i));
    return out;
}

}  // namespace pathsig
