#pragma once

// Hierarchical saliency on a binary partition tree and its planar projection.

#include <pats/image.hpp>
#include <pats/partition_tree.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace pats {

/// Contrast share of P when merged with Q: the smaller segment takes the larger share.
inline double figure_ground(double distance, double area_p, double area_q)
{
    return distance * area_q / (area_p + area_q);
}

/// Peripheral damping of a segment with `border_p` pixel edges on the image border.
/// Exactly s_fg when border_p == 0.
inline double peripheral(double s_fg, double area_p, double border_p)
{
    return s_fg * area_p / (area_p + (border_p * border_p + std::sqrt(area_p) * border_p) / 2.0);
}

/// Per-node saliency terms, indexed by node id.
struct SaliencyTree {
    std::vector<double> s_fg;
    std::vector<double> s_peri;
    std::vector<double> s_hier;
    /// Nodes touched by the pass that produced this (equals node count).
    std::size_t visits = 0;
};

/// Single top-down pass: the root holds no saliency; every other node P with
/// sibling Q and parent R receives s_hier(R) * A_P / (A_P + A_Q) plus its own
/// peripheral-damped figure-ground share of R's merge distance.
inline SaliencyTree propagate_hierarchical(const PartitionTree& tree)
{
    const std::size_t n = tree.node_count();
    SaliencyTree s;
    s.s_fg.assign(n, 0.0);
    s.s_peri.assign(n, 0.0);
    s.s_hier.assign(n, 0.0);
    if (n == 0) return s;
    s.visits = 1;
    for (std::size_t i = n; i-- > 0;) {
        const PartitionNode& parent = tree.nodes[i];
        if (parent.is_leaf()) continue;
        const double left_area = static_cast<double>(tree.nodes[parent.left].area);
        const double right_area = static_cast<double>(tree.nodes[parent.right].area);
        const double inherited = s.s_hier[i];
        auto assign = [&](NodeId child, double own, double other) {
            const double fg = figure_ground(parent.merge_distance, own, other);
            const double peri =
                peripheral(fg, own, static_cast<double>(tree.nodes[child].boundary_perimeter));
            s.s_fg[child] = fg;
            s.s_peri[child] = peri;
            s.s_hier[child] = inherited * own / (own + other) + peri;
            ++s.visits;
        };
        assign(parent.left, left_area, right_area);
        assign(parent.right, right_area, left_area);
    }
    return s;
}

/// Planar saliency: per pixel, the maximum of s_hier along its leaf-to-root path
/// and the node attaining it (ties resolved to the deepest such node).
struct SaliencyMap {
    int width = 0;
    int height = 0;
    std::vector<double> s_max;
    std::vector<NodeId> argmax_node;
    /// Per-node path maximum and its argmax (a node's value is what its pixels get
    /// when the node is a leaf).
    std::vector<double> node_max;
    std::vector<NodeId> node_argmax;
    std::size_t visits = 0;

    double value(Pixel p) const { return s_max.at(checked_index(p)); }
    NodeId node(Pixel p) const { return argmax_node.at(checked_index(p)); }

private:
    std::size_t checked_index(Pixel p) const
    {
        if (p.x < 0 || p.y < 0 || p.x >= width || p.y >= height) {
            throw std::out_of_range("pixel (" + std::to_string(p.x) + "," + std::to_string(p.y) +
                                    ") outside saliency map");
        }
        return static_cast<std::size_t>(p.y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(p.x);
    }
};

inline SaliencyMap max_projection(const PartitionTree& tree, const SaliencyTree& s)
{
    const std::size_t n = tree.node_count();
    if (s.s_hier.size() != n) {
        throw std::invalid_argument("max_projection: saliency does not match tree");
    }
    SaliencyMap map;
    map.width = tree.width;
    map.height = tree.height;
    map.node_max.assign(n, 0.0);
    map.node_argmax.assign(n, kNoNode);
    if (n > 0) {
        map.node_max[tree.root] = s.s_hier[tree.root];
        map.node_argmax[tree.root] = tree.root;
        map.visits = 1;
    }
    for (std::size_t i = n; i-- > 0;) {
        const PartitionNode& node = tree.nodes[i];
        if (node.is_leaf()) continue;
        for (NodeId child : {node.left, node.right}) {
            // >= lets the deeper node win ties.
            if (s.s_hier[child] >= map.node_max[i]) {
                map.node_max[child] = s.s_hier[child];
                map.node_argmax[child] = child;
            } else {
                map.node_max[child] = map.node_max[i];
                map.node_argmax[child] = map.node_argmax[i];
            }
            ++map.visits;
        }
    }
    const std::size_t pixels = tree.leaf_of_pixel.size();
    map.s_max.resize(pixels);
    map.argmax_node.resize(pixels);
    for (std::size_t p = 0; p < pixels; ++p) {
        const NodeId leaf = tree.leaf_of_pixel[p];
        map.s_max[p] = map.node_max[leaf];
        map.argmax_node[p] = map.node_argmax[leaf];
    }
    return map;
}

/// The segment a click at `pixel` selects.
inline NodeId most_salient_segment(const SaliencyMap& map, Pixel pixel)
{
    return map.node(pixel);
}

/// Min-max normalisation to 0..255, rounding half up; a constant map renders black.
inline GrayImage render_map(const SaliencyMap& map)
{
    GrayImage out(map.width, map.height, 0);
    if (map.s_max.empty()) return out;
    const auto [lo_it, hi_it] = std::minmax_element(map.s_max.begin(), map.s_max.end());
    const double lo = *lo_it;
    const double range = *hi_it - lo;
    if (!(range > 0.0)) return out;
    for (std::size_t i = 0; i < map.s_max.size(); ++i) {
        const double v = std::floor((map.s_max[i] - lo) / range * 255.0 + 0.5);
        out[i] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
    }
    return out;
}

} // namespace pats
