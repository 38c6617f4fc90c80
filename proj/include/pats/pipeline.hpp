#pragma once

#include <pats/atomic_partition.hpp>
#include <pats/partition_tree.hpp>
#include <pats/saliency.hpp>

#include <chrono>
#include <utility>

namespace pats {

struct PipelineOptions {
    /// 3x3 box blur on Lab before the gradient.
    bool smooth = true;
    ColorEdgeDistance distance{};
};

/// Everything derived from one image: immutable once built, shareable across sessions.
struct Segmentation {
    PartitionTree tree;
    SaliencyTree saliency;
    SaliencyMap map;
    GrayImage rendered;
    LeafOrder leaf_order;

    explicit Segmentation(PartitionTree t)
        : tree(std::move(t)),
          saliency(propagate_hierarchical(tree)),
          map(max_projection(tree, saliency)),
          rendered(render_map(map)),
          leaf_order(tree)
    {
    }

    int width() const noexcept { return tree.width; }
    int height() const noexcept { return tree.height; }
};

struct StageTimings {
    double color_ms = 0;
    double gradient_ms = 0;
    double watershed_ms = 0;
    double tree_ms = 0;
    double saliency_ms = 0;

    double total_ms() const { return color_ms + gradient_ms + watershed_ms + tree_ms + saliency_ms; }
};

inline LabelMap atomic_partition(const ColorImage& img, const PipelineOptions& opt, LabImage* lab_out = nullptr,
                                 GradientMap* grad_out = nullptr)
{
    LabImage lab = to_lab(img);
    if (opt.smooth) lab = box_blur(lab);
    GradientMap grad = color_gradient(lab);
    LabelMap labels = watershed(grad);
    if (lab_out) *lab_out = std::move(lab);
    if (grad_out) *grad_out = std::move(grad);
    return labels;
}

inline PartitionTree build_partition_tree(const ColorImage& img, const PipelineOptions& opt = {},
                                          StageTimings* timings = nullptr)
{
    using clock = std::chrono::steady_clock;
    auto ms = [](clock::time_point a, clock::time_point b) {
        return std::chrono::duration<double, std::milli>(b - a).count();
    };
    const auto t0 = clock::now();
    LabImage lab = to_lab(img);
    if (opt.smooth) lab = box_blur(lab);
    const auto t1 = clock::now();
    GradientMap grad = color_gradient(lab);
    const auto t2 = clock::now();
    LabelMap labels = watershed(grad);
    const auto t3 = clock::now();
    PartitionTree tree = build_tree(labels, lab, grad, opt.distance);
    const auto t4 = clock::now();
    if (timings) {
        timings->color_ms = ms(t0, t1);
        timings->gradient_ms = ms(t1, t2);
        timings->watershed_ms = ms(t2, t3);
        timings->tree_ms = ms(t3, t4);
    }
    return tree;
}

/// Full pipeline: watershed, greedy tree, saliency, projection, rendering.
inline Segmentation segment(const ColorImage& img, const PipelineOptions& opt = {}, StageTimings* timings = nullptr)
{
    PartitionTree tree = build_partition_tree(img, opt, timings);
    const auto t0 = std::chrono::steady_clock::now();
    Segmentation seg(std::move(tree));
    if (timings) {
        timings->saliency_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    }
    return seg;
}

} // namespace pats
