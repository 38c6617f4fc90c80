#pragma once

// Saliency-map scoring against binary ground truth with an optimal threshold per image.

#include <pats/image.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace pats {

struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;

    std::uint64_t total() const noexcept { return tp + tn + fp + fn; }
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

enum class Measure { FBeta, Mcc };

inline const char* measure_name(Measure m) { return m == Measure::FBeta ? "fbeta" : "mcc"; }

inline Measure parse_measure(const std::string& s)
{
    if (s == "fbeta") return Measure::FBeta;
    if (s == "mcc") return Measure::Mcc;
    throw std::invalid_argument("unknown measure '" + s + "' (expected fbeta or mcc)");
}

/// A score plus whether a degenerate-case convention produced it.
struct Score {
    double value = 0.0;
    bool degenerate = false;
};

inline constexpr double kDefaultBeta2 = 0.3;

inline ConfusionCounts confusion(const BinaryMask& prediction, const BinaryMask& gt)
{
    if (!same_shape(prediction, gt)) {
        throw std::invalid_argument("confusion: mask dimensions differ");
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < gt.size(); ++i) {
        const bool p = prediction[i] != 0;
        const bool g = gt[i] != 0;
        c.tp += p && g;
        c.fp += p && !g;
        c.fn += !p && g;
        c.tn += !p && !g;
    }
    return c;
}

/// (1+b2)tp / ((1+b2)tp + fp + b2 fn). Nothing to find and nothing found scores 1
/// (flagged); tp = 0 otherwise scores 0.
inline Score f_beta_score(const ConfusionCounts& c, double beta2 = kDefaultBeta2)
{
    if (!(beta2 > 0.0)) {
        throw std::invalid_argument("f_beta: beta2 must be positive");
    }
    if (c.tp == 0 && c.fp == 0 && c.fn == 0) {
        return {1.0, true};
    }
    const double tp = static_cast<double>(c.tp);
    const double num = (1.0 + beta2) * tp;
    return {num / (num + static_cast<double>(c.fp) + beta2 * static_cast<double>(c.fn)), false};
}

inline double f_beta(const ConfusionCounts& c, double beta2 = kDefaultBeta2)
{
    return f_beta_score(c, beta2).value;
}

/// Matthews correlation; any zero marginal gives 0 (flagged).
inline Score mcc_score(const ConfusionCounts& c)
{
    const double tp = static_cast<double>(c.tp);
    const double tn = static_cast<double>(c.tn);
    const double fp = static_cast<double>(c.fp);
    const double fn = static_cast<double>(c.fn);
    const double d1 = tp + fp, d2 = tp + fn, d3 = tn + fp, d4 = tn + fn;
    if (d1 == 0.0 || d2 == 0.0 || d3 == 0.0 || d4 == 0.0) {
        return {0.0, true};
    }
    // Square roots taken pairwise keep the product in range for large images.
    const double v = (tp * tn - fp * fn) / (std::sqrt(d1 * d2) * std::sqrt(d3 * d4));
    return {std::clamp(v, -1.0, 1.0), false};
}

inline double mcc(const ConfusionCounts& c) { return mcc_score(c).value; }

inline Score score(const ConfusionCounts& c, Measure m, double beta2 = kDefaultBeta2)
{
    return m == Measure::FBeta ? f_beta_score(c, beta2) : mcc_score(c);
}

/// Ground truth files are nominally binary but stored 8-bit: > 127 is foreground.
inline BinaryMask binarize_ground_truth(const GrayImage& gt)
{
    BinaryMask m(gt.width(), gt.height(), 0);
    for (std::size_t i = 0; i < gt.size(); ++i) m[i] = gt[i] > 127;
    return m;
}

/// Foreground where saliency >= t; t = 256 gives the empty mask.
inline BinaryMask threshold_map(const GrayImage& sal, int t)
{
    BinaryMask m(sal.width(), sal.height(), 0);
    for (std::size_t i = 0; i < sal.size(); ++i) m[i] = static_cast<int>(sal[i]) >= t;
    return m;
}

struct ThresholdResult {
    int threshold = 0;
    double score = 0.0;
    bool degenerate = false;
    ConfusionCounts counts;
};

/// Best of the 257 binarizations sal >= t, t = 0..256; the smallest t wins ties.
/// Counts for all thresholds come from suffix sums over per-level histograms.
inline ThresholdResult best_threshold(const GrayImage& sal, const BinaryMask& gt, Measure measure,
                                      double beta2 = kDefaultBeta2)
{
    if (!same_shape(sal, gt)) {
        throw std::invalid_argument("best_threshold: dimensions differ");
    }
    std::array<std::uint64_t, 257> fg{};
    std::array<std::uint64_t, 257> bg{};
    for (std::size_t i = 0; i < sal.size(); ++i) {
        (gt[i] ? fg : bg)[sal[i]]++;
    }
    const std::uint64_t total_fg = std::accumulate(fg.begin(), fg.end(), std::uint64_t{0});
    const std::uint64_t total_bg = std::accumulate(bg.begin(), bg.end(), std::uint64_t{0});

    ThresholdResult best;
    bool have = false;
    std::uint64_t tp = 0, fp = 0;
    // Walk t downwards so the counts accumulate, then keep the smallest t among equals.
    std::array<ConfusionCounts, 257> by_t{};
    for (int t = 256; t >= 0; --t) {
        if (t < 256) {
            tp += fg[t];
            fp += bg[t];
        }
        by_t[t] = {tp, total_bg - fp, fp, total_fg - tp};
    }
    for (int t = 0; t <= 256; ++t) {
        const Score s = score(by_t[t], measure, beta2);
        if (!have || s.value > best.score) {
            best = {t, s.value, s.degenerate, by_t[t]};
            have = true;
        }
    }
    return best;
}

struct ImageResult {
    std::string name;
    int threshold = 0;
    double score = 0.0;
    std::vector<std::string> flags;
};

struct DatasetReport {
    std::string name;
    std::vector<ImageResult> images;
    /// (name, reason) of pairs that could not be scored.
    std::vector<std::pair<std::string, std::string>> skipped;
    double mean = 0.0;
};

struct BenchmarkReport {
    Measure measure = Measure::FBeta;
    double beta2 = kDefaultBeta2;
    std::vector<DatasetReport> datasets;
    /// Arithmetic mean of dataset means.
    double overall = 0.0;

    std::size_t skipped_count() const
    {
        std::size_t n = 0;
        for (const auto& d : datasets) n += d.skipped.size();
        return n;
    }
};

struct ScoredPair {
    std::string name;
    GrayImage saliency;
    BinaryMask ground_truth;
};

inline ImageResult evaluate_image(const std::string& name, const GrayImage& sal, const BinaryMask& gt,
                                  Measure measure, double beta2 = kDefaultBeta2)
{
    const ThresholdResult r = best_threshold(sal, gt, measure, beta2);
    ImageResult out{name, r.threshold, r.score, {}};
    const std::size_t fg = count_foreground(gt);
    if (fg == 0) out.flags.emplace_back("empty_gt");
    if (fg == gt.size()) out.flags.emplace_back("full_gt");
    if (r.degenerate) out.flags.emplace_back("degenerate_score");
    return out;
}

/// Arithmetic mean of the per-image best scores. Summed in ascending order so the
/// result does not depend on image order, not even in the last bit.
inline double mean_score(const std::vector<ImageResult>& images)
{
    if (images.empty()) return 0.0;
    std::vector<double> v;
    v.reserve(images.size());
    for (const auto& r : images) v.push_back(r.score);
    std::sort(v.begin(), v.end());
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

inline DatasetReport evaluate_dataset(const std::string& name, const std::vector<ScoredPair>& pairs,
                                      Measure measure, double beta2 = kDefaultBeta2)
{
    DatasetReport rep;
    rep.name = name;
    for (const auto& p : pairs) {
        if (!same_shape(p.saliency, p.ground_truth)) {
            rep.skipped.emplace_back(p.name, "size mismatch");
            continue;
        }
        rep.images.push_back(evaluate_image(p.name, p.saliency, p.ground_truth, measure, beta2));
    }
    rep.mean = mean_score(rep.images);
    return rep;
}

/// Overall figure = mean over datasets of their means (not pooled over images).
inline double overall_score(const std::vector<DatasetReport>& datasets)
{
    if (datasets.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& d : datasets) sum += d.mean;
    return sum / static_cast<double>(datasets.size());
}

} // namespace pats
