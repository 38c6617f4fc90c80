#pragma once

// Click-driven object selection over a saliency decomposition.

#include <pats/image.hpp>
#include <pats/pipeline.hpp>

#include <algorithm>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace pats {

/// Precondition failure that depends on session state (e.g. nothing selected).
class SelectionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Closed polygon over pixel-corner coordinates: (x, y) is the top-left corner of pixel (x, y).
using Polygon = std::vector<Pixel>;

/// Crack-following boundary of every 4-connected foreground component (and hole).
/// Outer boundaries run clockwise on screen (y down), holes counter-clockwise;
/// collinear vertices are dropped.
inline std::vector<Polygon> trace_outline(const BinaryMask& mask)
{
    const int w = mask.width();
    const int h = mask.height();
    auto fg = [&](int x, int y) { return x >= 0 && y >= 0 && x < w && y < h && mask(x, y) != 0; };
    auto key = [&](int x, int y) { return static_cast<std::uint64_t>(y) * static_cast<std::uint64_t>(w + 1) + x; };

    struct Edge {
        Pixel from;
        Pixel to;
    };
    std::vector<Edge> edges;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!fg(x, y)) continue;
            if (!fg(x, y - 1)) edges.push_back({{x, y}, {x + 1, y}});
            if (!fg(x + 1, y)) edges.push_back({{x + 1, y}, {x + 1, y + 1}});
            if (!fg(x, y + 1)) edges.push_back({{x + 1, y + 1}, {x, y + 1}});
            if (!fg(x - 1, y)) edges.push_back({{x, y + 1}, {x, y}});
        }
    }
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> outgoing;
    outgoing.reserve(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) {
        outgoing[key(edges[i].from.x, edges[i].from.y)].push_back(i);
    }

    std::vector<std::uint8_t> used(edges.size(), 0);
    std::vector<Polygon> out;
    for (std::size_t start = 0; start < edges.size(); ++start) {
        if (used[start]) continue;
        Polygon loop;
        std::size_t cur = start;
        while (true) {
            used[cur] = 1;
            loop.push_back(edges[cur].from);
            const Pixel end = edges[cur].to;
            const auto& cand = outgoing[key(end.x, end.y)];
            // At a diagonal pinch two edges leave the vertex; turning right keeps
            // 4-connected components separate.
            const int dx = edges[cur].to.x - edges[cur].from.x;
            const int dy = edges[cur].to.y - edges[cur].from.y;
            std::size_t next = edges.size();
            int best_rank = 4;
            for (std::size_t c : cand) {
                if (used[c]) continue;
                const int ex = edges[c].to.x - edges[c].from.x;
                const int ey = edges[c].to.y - edges[c].from.y;
                // Screen coordinates: right turn of (dx, dy) is (-dy, dx).
                const int rank = (ex == -dy && ey == dx) ? 0 : (ex == dx && ey == dy) ? 1 : 2;
                if (rank < best_rank) {
                    best_rank = rank;
                    next = c;
                }
            }
            if (next == edges.size()) break;
            cur = next;
        }
        // Drop collinear vertices.
        Polygon simplified;
        const std::size_t n = loop.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Pixel& prev = loop[(i + n - 1) % n];
            const Pixel& p = loop[i];
            const Pixel& nx = loop[(i + 1) % n];
            const long cross = long(p.x - prev.x) * (nx.y - p.y) - long(p.y - prev.y) * (nx.x - p.x);
            if (cross != 0) simplified.push_back(p);
        }
        out.push_back(std::move(simplified));
    }
    return out;
}

/// Pixels of the union of the given nodes' leaf sets.
inline BinaryMask expand_nodes(const Segmentation& seg, const std::vector<NodeId>& nodes)
{
    const std::size_t leaves = seg.tree.leaf_count();
    // Difference array over depth-first leaf positions.
    std::vector<int> delta(leaves + 1, 0);
    for (NodeId n : nodes) {
        ++delta[seg.leaf_order.first[n]];
        --delta[seg.leaf_order.last[n]];
    }
    std::vector<std::uint8_t> covered(leaves, 0);
    int run = 0;
    for (std::size_t i = 0; i < leaves; ++i) {
        run += delta[i];
        covered[i] = run > 0;
    }
    BinaryMask mask(seg.width(), seg.height(), 0);
    for (std::size_t p = 0; p < mask.size(); ++p) {
        mask[p] = covered[seg.leaf_order.position_of_leaf[seg.tree.leaf_of_pixel[p]]];
    }
    return mask;
}

struct GraspRequest {
    std::string image_id;
    Pixel point;
    BinaryMask mask;
};

/// Result of a traversal step; `noop` when the tree edge does not exist.
struct StepResult {
    NodeId node = kNoNode;
    bool noop = false;
};

/// Operator selection state over one immutable segmentation snapshot.
///
/// mask = (pixels(active) ∪ pixels(additive)) \ pixels(subtractive). Adding a node
/// withdraws it from the subtractive set and vice versa, so the two sets stay disjoint.
class SelectionSession {
public:
    SelectionSession(std::shared_ptr<const Segmentation> seg, std::string image_id)
        : seg_(std::move(seg)), image_id_(std::move(image_id))
    {
        if (!seg_) throw std::invalid_argument("SelectionSession: null segmentation");
    }

    const Segmentation& segmentation() const noexcept { return *seg_; }
    std::shared_ptr<const Segmentation> shared_segmentation() const noexcept { return seg_; }
    const std::string& image_id() const noexcept { return image_id_; }
    std::optional<NodeId> active_node() const noexcept { return active_; }
    const std::set<NodeId>& additive_nodes() const noexcept { return additive_; }
    const std::set<NodeId>& subtractive_nodes() const noexcept { return subtractive_; }
    std::optional<Pixel> grasp_point() const noexcept { return grasp_point_; }

    /// Last click wins.
    NodeId click_select(Pixel p)
    {
        active_ = most_salient_segment(seg_->map, checked(p));
        invalidate();
        return *active_;
    }

    StepResult grow()
    {
        const NodeId cur = require_active();
        const NodeId parent = seg_->tree.nodes[cur].parent;
        if (parent == kNoNode) return {cur, true};
        active_ = parent;
        invalidate();
        return {parent, false};
    }

    /// Step to the child containing `toward`.
    StepResult shrink(Pixel toward)
    {
        const NodeId cur = require_active();
        const NodeId leaf = seg_->tree.leaf_at(checked(toward));
        const PartitionNode& node = seg_->tree.nodes[cur];
        if (!seg_->leaf_order.covers(cur, leaf)) {
            throw SelectionError("shrink target lies outside the active segment");
        }
        if (node.is_leaf()) return {cur, true};
        const NodeId child = seg_->leaf_order.covers(node.left, leaf) ? node.left : node.right;
        active_ = child;
        invalidate();
        return {child, false};
    }

    NodeId add_part(Pixel p)
    {
        require_active();
        const NodeId n = most_salient_segment(seg_->map, checked(p));
        subtractive_.erase(n);
        additive_.insert(n);
        invalidate();
        return n;
    }

    NodeId subtract_part(Pixel p)
    {
        require_active();
        const NodeId n = most_salient_segment(seg_->map, checked(p));
        additive_.erase(n);
        subtractive_.insert(n);
        invalidate();
        return n;
    }

    /// Clears active node, part sets and grasp point.
    void reset()
    {
        active_.reset();
        additive_.clear();
        subtractive_.clear();
        grasp_point_.reset();
        invalidate();
    }

    /// Reverts a false click; same effect as reset().
    void delete_selection() { reset(); }

    const BinaryMask& mask() const
    {
        if (!mask_) {
            std::vector<NodeId> include;
            if (active_) include.push_back(*active_);
            include.insert(include.end(), additive_.begin(), additive_.end());
            BinaryMask m = expand_nodes(*seg_, include);
            if (!subtractive_.empty()) {
                const BinaryMask sub =
                    expand_nodes(*seg_, std::vector<NodeId>(subtractive_.begin(), subtractive_.end()));
                for (std::size_t i = 0; i < m.size(); ++i) m[i] = m[i] && !sub[i];
            }
            mask_ = std::move(m);
        }
        return *mask_;
    }

    std::vector<Polygon> outline() const { return trace_outline(mask()); }

    /// Records the grasp point; throws SelectionError (state unchanged) when outside the mask.
    GraspRequest confirm_grasp_point(Pixel p)
    {
        checked(p);
        const BinaryMask& m = mask();
        if (!m(p.x, p.y)) {
            throw SelectionError("grasp point lies outside the selected segment; choose a different grasp point");
        }
        grasp_point_ = p;
        return {image_id_, p, m};
    }

private:
    Pixel checked(Pixel p) const
    {
        if (p.x < 0 || p.y < 0 || p.x >= seg_->width() || p.y >= seg_->height()) {
            throw std::out_of_range("pixel (" + std::to_string(p.x) + "," + std::to_string(p.y) +
                                    ") outside the image");
        }
        return p;
    }

    NodeId require_active() const
    {
        if (!active_) throw SelectionError("no active segment");
        return *active_;
    }

    void invalidate() { mask_.reset(); }

    std::shared_ptr<const Segmentation> seg_;
    std::string image_id_;
    std::optional<NodeId> active_;
    std::set<NodeId> additive_;
    std::set<NodeId> subtractive_;
    std::optional<Pixel> grasp_point_;
    mutable std::optional<BinaryMask> mask_;
};

} // namespace pats
