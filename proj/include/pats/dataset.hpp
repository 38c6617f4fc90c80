#pragma once

// Benchmark ingestion: prediction and ground-truth directories paired by file stem.

#include <pats/evaluation.hpp>
#include <pats/image_io.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace pats {

inline bool is_image_file(const std::filesystem::path& p)
{
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp" || ext == ".pgm" || ext == ".tif" ||
           ext == ".tiff";
}

/// Scores every ground-truth image against the prediction with the same stem.
/// Missing, unreadable or size-mismatched pairs are skipped and recorded.
inline DatasetReport evaluate_directories(const std::string& name, const std::filesystem::path& pred_dir,
                                          const std::filesystem::path& gt_dir, Measure measure,
                                          double beta2 = kDefaultBeta2)
{
    namespace fs = std::filesystem;
    DatasetReport rep;
    rep.name = name;
    if (!fs::is_directory(gt_dir)) throw std::invalid_argument("not a directory: " + gt_dir.string());
    if (!fs::is_directory(pred_dir)) throw std::invalid_argument("not a directory: " + pred_dir.string());

    std::map<std::string, fs::path> preds;
    for (const auto& e : fs::directory_iterator(pred_dir)) {
        if (e.is_regular_file() && is_image_file(e.path())) preds.emplace(e.path().stem().string(), e.path());
    }
    std::map<std::string, fs::path> gts;
    for (const auto& e : fs::directory_iterator(gt_dir)) {
        if (e.is_regular_file() && is_image_file(e.path())) gts.emplace(e.path().stem().string(), e.path());
    }
    for (const auto& [stem, gt_path] : gts) {
        auto it = preds.find(stem);
        if (it == preds.end()) {
            rep.skipped.emplace_back(stem, "no prediction");
            continue;
        }
        GrayImage sal, gt;
        try {
            sal = load_gray_image(it->second.string());
            gt = load_gray_image(gt_path.string());
        } catch (const std::exception& e) {
            rep.skipped.emplace_back(stem, e.what());
            continue;
        }
        if (!same_shape(sal, gt)) {
            rep.skipped.emplace_back(stem, "size mismatch");
            continue;
        }
        rep.images.push_back(evaluate_image(stem, sal, binarize_ground_truth(gt), measure, beta2));
    }
    rep.mean = mean_score(rep.images);
    return rep;
}

inline std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

/// Columns: image, best_threshold, score, flags. With several datasets the image
/// column is "<dataset>/<stem>".
inline void write_report_csv(std::ostream& os, const BenchmarkReport& report)
{
    os << "image,best_threshold,score,flags\n";
    const bool prefix = report.datasets.size() > 1;
    char buf[32];
    for (const auto& d : report.datasets) {
        const std::string pre = prefix ? d.name + "/" : "";
        for (const auto& r : d.images) {
            std::string flags;
            for (const auto& f : r.flags) flags += (flags.empty() ? "" : ";") + f;
            std::snprintf(buf, sizeof buf, "%.6f", r.score);
            os << csv_field(pre + r.name) << ',' << r.threshold << ',' << buf << ',' << csv_field(flags) << '\n';
        }
        for (const auto& [stem, why] : d.skipped) {
            os << csv_field(pre + stem) << ",,," << csv_field("skipped: " + why) << '\n';
        }
    }
}

/// "<measure>: <dataset> <mean> ... (<overall>)".
inline std::string summary_line(const BenchmarkReport& report)
{
    std::string s = measure_name(report.measure);
    s += ":";
    char buf[64];
    for (const auto& d : report.datasets) {
        std::snprintf(buf, sizeof buf, " %s %.4f", d.name.c_str(), d.mean);
        s += buf;
    }
    std::snprintf(buf, sizeof buf, " (%.4f)", report.overall);
    s += buf;
    return s;
}

} // namespace pats
