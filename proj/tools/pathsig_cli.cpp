// pathsig: synthetic cohorts, interaction features, correlation reports and
// cross-validated classification.
//
// Exit status: 0 success, 2 usage error, 3 data error.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pathsig/pipeline.hpp"

namespace {

constexpr int kUsageError = 2;
constexpr int kDataError = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void warn(const std::string& msg) { std::cerr << "warning: " << msg << '\n'; }

int run_synth(const pathsig::CohortSpec& spec, const std::filesystem::path& out) {
    const auto cohort = pathsig::generate_cohort(spec);
    pathsig::io::write_cohort(out, cohort);
    std::cerr << "wrote " << cohort.size() << " subjects to " << out.string() << '\n';
    return 0;
}

int run_features(const pathsig::RunConfig& cfg) {
    auto run = pathsig::extract_features(cfg.segments_dir, cfg.tracks_dir, cfg.features, cfg.n_threads);
    for (const auto& s : run.skipped) warn("skipped subject " + s.subject_id + ": " + s.reason);
    pathsig::io::write_feature_matrix(cfg.out_dir / "features.csv", run.matrix);

    nlohmann::ordered_json meta;
    meta["n_subjects"] = run.matrix.rows();
    meta["n_features"] = run.matrix.cols();
    meta["n_skipped"] = run.skipped.size();
    meta["skipped"] = nlohmann::ordered_json::array();
    for (const auto& s : run.skipped) meta["skipped"].push_back({{"subject_id", s.subject_id}, {"reason", s.reason}});
    auto out = pathsig::io::open_out(cfg.out_dir / "features_meta.json");
    out << meta.dump(2) << '\n';
    return 0;
}

pathsig::JoinedData load_joined(const pathsig::RunConfig& cfg) {
    auto joined = pathsig::join_scores(pathsig::io::read_feature_matrix(cfg.matrix_file),
                                       pathsig::io::read_scores(cfg.scores_file));
    for (const auto& id : joined.unmatched) warn("no score record for subject " + id);
    return joined;
}

int run_correlate(const pathsig::RunConfig& cfg, pathsig::Scale scale) {
    const auto joined = load_joined(cfg);
    pathsig::BootstrapOptions opt;
    opt.n_boot = cfg.n_boot;
    opt.ci_level = cfg.ci_level;
    opt.seed = cfg.seed;
    opt.n_threads = cfg.n_threads;
    const auto rows = pathsig::correlate(joined, scale, opt);
    pathsig::io::write_correlation_report(cfg.out_dir / ("correlation_" + std::string(to_string(scale)) + ".csv"),
                                          rows);
    return 0;
}

int run_classify(const pathsig::RunConfig& cfg, pathsig::Scale scale, pathsig::FeatureSet set) {
    pathsig::JoinedData joined;
    if (!cfg.matrix_file.empty()) {
        joined = load_joined(cfg);
    } else {
        joined.scores = pathsig::io::read_scores(cfg.scores_file);
    }
    pathsig::CvOptions opt;
    opt.k = cfg.k_folds;
    opt.seed = cfg.seed;
    opt.svm.c_reg = cfg.c_reg;
    opt.svm.seed = cfg.seed;
    const auto rep = pathsig::classify(joined, scale, set, opt);
    const std::string stem = std::string(to_string(scale)) + "_" + rep.feature_set;
    pathsig::io::write_cv_report(cfg.out_dir / ("cv_" + stem + ".csv"), rep);
    pathsig::io::write_roc_table(cfg.out_dir / ("roc_" + stem + ".csv"), rep);
    std::printf("%s %s auc_mean=%.4f auc_std=%.4f\n", std::string(to_string(scale)).c_str(), rep.feature_set.c_str(),
                rep.auc_mean, rep.auc_std);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Path-signature features of patient-clinician interactions"};
    app.set_config("--config", "", "Config file (TOML/INI, same keys as the flags; flags win)");
    app.require_subcommand(1);

    pathsig::RunConfig cfg;
    pathsig::CohortSpec spec;
    std::string scale_name;
    std::string feature_set = "interaction";

    auto positive = CLI::PositiveNumber;

    auto* synth = app.add_subcommand("synth", "Generate a synthetic cohort");
    synth->add_option("--n", spec.n_subjects, "Number of subjects (>= 8)")->required();
    synth->add_option("--seed", spec.seed, "Random seed");
    synth->add_option("--effect", spec.effect_size, "Planted effect size (>= 0)")->check(CLI::NonNegativeNumber);
    synth->add_option("--session-s", spec.session_s, "Session length in seconds")->check(positive);
    synth->add_option("--fps", spec.fps, "Video frame rate")->check(positive);
    synth->add_option("--n-frames", spec.n_frames, "Frames per head track")->check(positive);
    synth->add_option("--score-noise", spec.score_noise_sd, "Score noise sd relative to ability")
        ->check(CLI::NonNegativeNumber);
    synth->add_option("--out", cfg.out_dir, "Output directory")->required();

    auto* features = app.add_subcommand("features", "Extract the feature matrix");
    features->add_option("--segments", cfg.segments_dir, "Directory of <subject>.jsonl speech segments")->required();
    features->add_option("--tracks", cfg.tracks_dir, "Directory of <subject>.csv head tracks")->required();
    features->add_option("--speech-window-s", cfg.features.speech_window_s, "Speech window in seconds")->check(positive);
    features->add_option("--max-frames", cfg.features.movement_max_frames, "Movement window in frames")->check(positive);
    features->add_option("--fps", cfg.features.fps, "Video frame rate")->check(positive);
    features->add_option("--speech-depth", cfg.features.speech_logsig_depth, "Speech log-signature depth")
        ->check(CLI::Range(1, 8));
    features->add_option("--movement-depth", cfg.features.movement_logsig_depth, "Movement log-signature depth")
        ->check(CLI::Range(1, 6));
    features->add_flag("--drop-level1", cfg.features.drop_level1, "Omit level-1 speech log-signature terms");
    features->add_option("--threads", cfg.n_threads, "Worker threads")->check(positive);
    features->add_option("--out", cfg.out_dir, "Output directory")->required();

    auto* correlate = app.add_subcommand("correlate", "Bootstrapped Spearman correlations against a scale");
    correlate->add_option("--matrix", cfg.matrix_file, "Feature matrix CSV")->required();
    correlate->add_option("--scores", cfg.scores_file, "Scores CSV")->required();
    correlate->add_option("--scale", scale_name, "WISC, TEA, NEPSY or CELF")->required();
    correlate->add_option("--n-boot", cfg.n_boot, "Bootstrap replicas")->check(positive);
    correlate->add_option("--ci-level", cfg.ci_level, "Confidence level")->check(CLI::Range(0.0, 1.0));
    correlate->add_option("--seed", cfg.seed, "Random seed");
    correlate->add_option("--threads", cfg.n_threads, "Worker threads")->check(positive);
    correlate->add_option("--out", cfg.out_dir, "Output directory")->required();

    auto* classify = app.add_subcommand("classify", "Cross-validated linear SVM on binarized scores");
    classify->add_option("--matrix", cfg.matrix_file, "Feature matrix CSV");
    classify->add_option("--scores", cfg.scores_file, "Scores CSV")->required();
    classify->add_option("--scale", scale_name, "WISC, TEA, NEPSY or CELF")->required();
    classify->add_option("--features", feature_set, "interaction or demographics");
    classify->add_option("--k", cfg.k_folds, "Number of folds")->check(CLI::Range(2, 100));
    classify->add_option("--c", cfg.c_reg, "SVM regularization constant C")->check(positive);
    classify->add_option("--seed", cfg.seed, "Random seed");
    classify->add_option("--out", cfg.out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageError;
    }

    // Flag values CLI11 validators cannot check are usage errors too.
    pathsig::Scale scale{};
    pathsig::FeatureSet set{};
    try {
        if (*synth) spec.validate();
        if (*correlate || *classify) scale = pathsig::parse_scale(scale_name);
        if (*classify) set = pathsig::parse_feature_set(feature_set);
        if (*classify && set == pathsig::FeatureSet::interaction && cfg.matrix_file.empty())
            throw UsageError("classify --features interaction needs --matrix");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    }

    try {
        if (*synth) return run_synth(spec, cfg.out_dir);
        if (*features) return run_features(cfg);
        if (*correlate) return run_correlate(cfg, scale);
        if (*classify) return run_classify(cfg, scale, set);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDataError;
    }
    return kUsageError;
}
