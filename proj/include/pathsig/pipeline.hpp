#pragma once

// Orchestration behind the command-line tool: cohort synthesis, per-subject
// feature extraction, correlation reports and cross-validated classification.

#include <algorithm>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pathsig/classifier.hpp"
#include "pathsig/error.hpp"
#include "pathsig/interaction.hpp"
#include "pathsig/io.hpp"
#include "pathsig/stats.hpp"
#include "pathsig/synth.hpp"

namespace pathsig {

namespace fs = std::filesystem;

struct RunConfig {
    fs::path segments_dir;
    fs::path tracks_dir;
    fs::path scores_file;
    fs::path matrix_file;
    fs::path out_dir = ".";
    FeatureConfig features{};
    std::size_t n_boot = 1000;
    double ci_level = 0.95;
    std::size_t k_folds = 4;
    double c_reg = 1.0;
    std::uint64_t seed = 0;
    unsigned n_threads = 1;
};

struct SkippedSubject {
    std::string subject_id;
    std::string reason;
};

struct FeatureRun {
    FeatureMatrix matrix;
    std::vector<SkippedSubject> skipped;
};

// One row per subject with a readable segments file and tracks file.
// Subjects are ordered by id; unreadable ones are reported, not fatal.
inline FeatureRun extract_features(const fs::path& segments_dir, const fs::path& tracks_dir, const FeatureConfig& cfg,
                                   unsigned n_threads = 1) {
    if (!fs::is_directory(segments_dir)) throw data_error("segments directory not found: " + segments_dir.string());
    if (!fs::is_directory(tracks_dir)) throw data_error("tracks directory not found: " + tracks_dir.string());
    std::vector<std::string> ids;
    for (const auto& e : fs::directory_iterator(segments_dir))
        if (e.is_regular_file() && e.path().extension() == ".jsonl") ids.push_back(e.path().stem().string());
    std::sort(ids.begin(), ids.end());

    const SessionFeatureExtractor extract(cfg);
    std::vector<std::optional<FeatureVector>> rows(ids.size());
    std::vector<std::string> errors(ids.size());
    detail::parallel_for(ids.size(), n_threads, [&](std::size_t i) {
        const fs::path tracks = tracks_dir / (ids[i] + ".csv");
        try {
            if (!fs::exists(tracks)) throw data_error("missing tracks file " + tracks.string());
            const auto segments = io::read_segments(segments_dir / (ids[i] + ".jsonl"));
            const auto [patient, clinician] = io::read_tracks(tracks);
            rows[i] = extract(segments, patient, clinician);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    FeatureRun run;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (!rows[i]) {
            run.skipped.push_back({ids[i], errors[i]});
            continue;
        }
        if (run.matrix.feature_names.empty()) run.matrix.feature_names = rows[i]->names;
        run.matrix.subject_ids.push_back(ids[i]);
        run.matrix.values.insert(run.matrix.values.end(), rows[i]->values.begin(), rows[i]->values.end());
    }
    if (run.matrix.subject_ids.empty()) throw data_error("no readable subjects under " + segments_dir.string());
    return run;
}

// Rows of `m` that have a score record, paired with those records.
struct JoinedData {
    FeatureMatrix matrix;
    std::vector<ScoreRecord> scores;
    std::vector<std::string> unmatched;
};

inline JoinedData join_scores(const FeatureMatrix& m, const std::vector<ScoreRecord>& scores) {
    std::map<std::string, const ScoreRecord*> by_id;
    for (const auto& r : scores) by_id.emplace(r.subject_id, &r);
    JoinedData j;
    j.matrix.feature_names = m.feature_names;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto it = by_id.find(m.subject_ids[r]);
        if (it == by_id.end()) {
            j.unmatched.push_back(m.subject_ids[r]);
            continue;
        }
        j.matrix.subject_ids.push_back(m.subject_ids[r]);
        auto row = m.row(r);
        j.matrix.values.insert(j.matrix.values.end(), row.begin(), row.end());
        j.scores.push_back(*it->second);
    }
    if (j.matrix.rows() == 0) throw data_error("no subject in the feature matrix has a score record");
    return j;
}

inline std::vector<BootstrapSummary> correlate(const JoinedData& data, Scale scale, const BootstrapOptions& opt) {
    std::vector<double> target;
    target.reserve(data.scores.size());
    for (const auto& r : data.scores) target.push_back(r.score(scale));
    if (is_constant(target))
        throw data_error("scale " + std::string(to_string(scale)) + " has the same score for every subject");
    return bootstrap_correlations(data.matrix, target, opt);
}

enum class FeatureSet { interaction, demographics };

inline FeatureSet parse_feature_set(std::string_view s) {
    if (s == "interaction") return FeatureSet::interaction;
    if (s == "demographics") return FeatureSet::demographics;
    throw invalid_input("unknown feature set '" + std::string(s) + "' (expected interaction or demographics)");
}

inline CvReport classify(const JoinedData& data, Scale scale, FeatureSet set, const CvOptions& opt) {
    std::vector<bool> y;
    for (const auto& r : data.scores) y.push_back(binarize(scale, r.score(scale)));
    const auto n_pos = static_cast<std::size_t>(std::count(y.begin(), y.end(), true));
    if (n_pos == 0 || n_pos == y.size())
        throw data_error("scale " + std::string(to_string(scale)) + ": labels contain a single class after binarization");
    try {
        if (set == FeatureSet::demographics) return demographics_baseline(data.scores, scale, opt);
        Matrix x(data.matrix.rows(), data.matrix.cols());
        x.data = data.matrix.values;
        CvReport rep = kfold_cv(x, y, opt);
        rep.scale = to_string(scale);
        rep.feature_set = "interaction";
        return rep;
    } catch (const invalid_input& e) {
        throw data_error("scale " + std::string(to_string(scale)) + ": " + e.what());
    }
}

}  // namespace pathsig
