#pragma once

// On-disk formats.
//
//   segments/<id>.jsonl  one {"start_s", "end_s", "speaker"} object per line
//   tracks/<id>.csv      frame,person,x,y
//   scores.csv           subject_id,wisc,tea,nepsy,celf,age_years,gender
//   features.csv         subject_id,<feature names...>
//
// Reports and feature matrices print doubles with 17 significant digits.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pathsig/classifier.hpp"
#include "pathsig/error.hpp"
#include "pathsig/interaction.hpp"
#include "pathsig/stats.hpp"
#include "pathsig/synth.hpp"

namespace pathsig::io {

namespace fs = std::filesystem;

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Shortest representation that parses back to the same double.
inline std::string fmt_short(double v) {
    char buf[40];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

inline std::string where(const fs::path& file, std::size_t line) {
    return file.string() + ":" + std::to_string(line);
}

inline double parse_double(std::string_view s, const fs::path& file, std::size_t line) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw data_error(where(file, line) + ": cannot parse number '" + std::string(s) + "'");
    return v;
}

template <class Int>
Int parse_int(std::string_view s, const fs::path& file, std::size_t line) {
    Int v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw data_error(where(file, line) + ": cannot parse integer '" + std::string(s) + "'");
    return v;
}

inline std::ifstream open_in(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw data_error("cannot open " + p.string() + " for reading");
    return in;
}

inline std::ofstream open_out(const fs::path& p) {
    if (p.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(p.parent_path(), ec);
        if (ec) throw data_error("cannot create directory " + p.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw data_error("cannot open " + p.string() + " for writing");
    return out;
}

inline void expect_header(std::string_view got, std::string_view want, const fs::path& file) {
    if (trim(got) != want)
        throw data_error(where(file, 1) + ": expected header '" + std::string(want) + "', got '" + std::string(got) + "'");
}

// --- speech segments -------------------------------------------------------

inline std::vector<SpeechSegment> read_segments(const fs::path& file) {
    auto in = open_in(file);
    std::vector<SpeechSegment> out;
    std::string line;
    std::size_t ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        if (trim(line).empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            SpeechSegment s;
            s.start_s = j.at("start_s").get<double>();
            s.end_s = j.at("end_s").get<double>();
            s.speaker = parse_role(j.at("speaker").get<std::string>());
            out.push_back(s);
        } catch (const nlohmann::json::exception& e) {
            throw data_error(where(file, ln) + ": " + e.what());
        } catch (const invalid_input& e) {
            throw data_error(where(file, ln) + ": " + e.what());
        }
    }
    return out;
}

inline void write_segments(const fs::path& file, const std::vector<SpeechSegment>& segments) {
    auto out = open_out(file);
    for (const auto& s : segments) {
        out << "{\"start_s\":" << fmt_short(s.start_s) << ",\"end_s\":" << fmt_short(s.end_s) << ",\"speaker\":\""
            << to_string(s.speaker) << "\"}\n";
    }
    if (!out) throw data_error("write failed: " + file.string());
}

// --- head tracks -----------------------------------------------------------

inline constexpr std::string_view tracks_header = "frame,person,x,y";

// Returns (patient, clinician).
inline std::pair<HeadTrack, HeadTrack> read_tracks(const fs::path& file) {
    auto in = open_in(file);
    std::pair<HeadTrack, HeadTrack> tracks{{Role::patient, {}}, {Role::clinician, {}}};
    std::string line;
    if (!std::getline(in, line)) throw data_error(file.string() + ": empty tracks file");
    expect_header(line, tracks_header, file);
    std::size_t ln = 1;
    while (std::getline(in, line)) {
        ++ln;
        if (trim(line).empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 4) throw data_error(where(file, ln) + ": expected 4 fields");
        TrackSample s{parse_int<std::int64_t>(f[0], file, ln), parse_double(f[2], file, ln),
                      parse_double(f[3], file, ln)};
        Role r;
        try {
            r = parse_role(f[1]);
        } catch (const invalid_input& e) {
            throw data_error(where(file, ln) + ": " + e.what());
        }
        (r == Role::patient ? tracks.first : tracks.second).samples.push_back(s);
    }
    try {
        tracks.first.validate();
        tracks.second.validate();
    } catch (const invalid_input& e) {
        throw data_error(file.string() + ": " + e.what());
    }
    return tracks;
}

inline void write_tracks(const fs::path& file, const HeadTrack& patient, const HeadTrack& clinician) {
    auto out = open_out(file);
    out << tracks_header << '\n';
    // interleave by frame, patient first
    std::size_t i = 0, j = 0;
    auto put = [&](const TrackSample& s, Role r) {
        out << s.frame << ',' << to_string(r) << ',' << fmt_short(s.x) << ',' << fmt_short(s.y) << '\n';
    };
    while (i < patient.samples.size() || j < clinician.samples.size()) {
        if (j >= clinician.samples.size() ||
            (i < patient.samples.size() && patient.samples[i].frame <= clinician.samples[j].frame)) {
            put(patient.samples[i++], Role::patient);
        } else {
            put(clinician.samples[j++], Role::clinician);
        }
    }
    if (!out) throw data_error("write failed: " + file.string());
}

// --- scores ----------------------------------------------------------------

inline constexpr std::string_view scores_header = "subject_id,wisc,tea,nepsy,celf,age_years,gender";

inline std::vector<ScoreRecord> read_scores(const fs::path& file) {
    auto in = open_in(file);
    std::string line;
    if (!std::getline(in, line)) throw data_error(file.string() + ": empty scores file");
    expect_header(line, scores_header, file);
    std::vector<ScoreRecord> out;
    std::size_t ln = 1;
    while (std::getline(in, line)) {
        ++ln;
        if (trim(line).empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 7) throw data_error(where(file, ln) + ": expected 7 fields");
        ScoreRecord r;
        r.subject_id = std::string(f[0]);
        r.wisc = parse_int<int>(f[1], file, ln);
        r.tea = parse_int<int>(f[2], file, ln);
        r.nepsy = parse_int<int>(f[3], file, ln);
        r.celf = parse_int<int>(f[4], file, ln);
        r.age_years = parse_double(f[5], file, ln);
        if (f[6] == "male") r.gender = Gender::male;
        else if (f[6] == "female") r.gender = Gender::female;
        else throw data_error(where(file, ln) + ": gender must be male or female");
        try {
            r.validate();
        } catch (const invalid_input& e) {
            throw data_error(where(file, ln) + ": " + e.what());
        }
        out.push_back(std::move(r));
    }
    return out;
}

inline void write_scores(const fs::path& file, const std::vector<ScoreRecord>& records) {
    auto out = open_out(file);
    out << scores_header << '\n';
    for (const auto& r : records) {
        out << r.subject_id << ',' << r.wisc << ',' << r.tea << ',' << r.nepsy << ',' << r.celf << ','
            << fmt_short(r.age_years) << ',' << (r.gender == Gender::male ? "male" : "female") << '\n';
    }
    if (!out) throw data_error("write failed: " + file.string());
}

// --- cohort ----------------------------------------------------------------

inline void write_cohort(const fs::path& dir, const std::vector<SubjectSession>& cohort) {
    std::vector<ScoreRecord> scores;
    for (const auto& s : cohort) {
        write_segments(dir / "segments" / (s.subject_id + ".jsonl"), s.segments);
        write_tracks(dir / "tracks" / (s.subject_id + ".csv"), s.patient, s.clinician);
        scores.push_back(s.scores);
    }
    write_scores(dir / "scores.csv", scores);
}

// --- feature matrix --------------------------------------------------------

inline void write_feature_matrix(const fs::path& file, const FeatureMatrix& m) {
    m.validate();
    auto out = open_out(file);
    out << "subject_id";
    for (const auto& n : m.feature_names) out << ',' << n;
    out << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        out << m.subject_ids[r];
        for (double v : m.row(r)) out << ',' << fmt17(v);
        out << '\n';
    }
    if (!out) throw data_error("write failed: " + file.string());
}

inline FeatureMatrix read_feature_matrix(const fs::path& file) {
    auto in = open_in(file);
    std::string line;
    if (!std::getline(in, line)) throw data_error(file.string() + ": empty feature matrix");
    const auto head = split_csv(line);
    if (head.empty() || head[0] != "subject_id") throw data_error(where(file, 1) + ": first column must be subject_id");
    FeatureMatrix m;
    for (std::size_t i = 1; i < head.size(); ++i) m.feature_names.emplace_back(head[i]);
    std::size_t ln = 1;
    while (std::getline(in, line)) {
        ++ln;
        if (trim(line).empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != head.size())
            throw data_error(where(file, ln) + ": expected " + std::to_string(head.size()) + " fields");
        m.subject_ids.emplace_back(f[0]);
        for (std::size_t i = 1; i < f.size(); ++i) m.values.push_back(parse_double(f[i], file, ln));
    }
    return m;
}

// --- reports ---------------------------------------------------------------

inline void write_correlation_report(const fs::path& file, const std::vector<BootstrapSummary>& rows) {
    auto out = open_out(file);
    out << "feature,point_rho,boot_mean,ci_low,ci_high,n_boot,n_skipped,significant\n";
    for (const auto& r : rows) {
        out << r.feature_name << ',' << fmt17(r.point_rho) << ',' << fmt17(r.boot_mean) << ',' << fmt17(r.ci_low) << ','
            << fmt17(r.ci_high) << ',' << r.n_boot << ',' << r.n_skipped << ',' << (r.significant ? "true" : "false")
            << '\n';
    }
    if (!out) throw data_error("write failed: " + file.string());
}

inline void write_cv_report(const fs::path& file, const CvReport& rep) {
    auto out = open_out(file);
    out << "scale,feature_set,fold,auc\n";
    for (std::size_t f = 0; f < rep.per_fold_auc.size(); ++f)
        out << rep.scale << ',' << rep.feature_set << ',' << f << ',' << fmt17(rep.per_fold_auc[f]) << '\n';
    out << rep.scale << ',' << rep.feature_set << ",mean," << fmt17(rep.auc_mean) << '\n';
    out << rep.scale << ',' << rep.feature_set << ",std," << fmt17(rep.auc_std) << '\n';
    if (!out) throw data_error("write failed: " + file.string());
}

inline void write_roc_table(const fs::path& file, const CvReport& rep) {
    auto out = open_out(file);
    out << "fold,fpr,tpr\n";
    for (std::size_t f = 0; f < rep.roc_points.size(); ++f)
        for (const auto& p : rep.roc_points[f]) out << f << ',' << fmt17(p.fpr) << ',' << fmt17(p.tpr) << '\n';
    if (!out) throw data_error("write failed: " + file.string());
}

}  // namespace pathsig::io
