#pragma once

#include <pats/image.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

namespace pats {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

/// Appearance and geometry of a (possibly merged) region.
struct RegionStats {
    std::uint64_t area = 0;
    /// Pixel edges lying on the image border.
    std::uint64_t boundary_perimeter = 0;
    std::array<double, 3> mean_lab{};
};

struct PartitionNode {
    NodeId id = kNoNode;
    NodeId left = kNoNode;
    NodeId right = kNoNode;
    NodeId parent = kNoNode;
    std::uint64_t area = 0;
    std::uint64_t boundary_perimeter = 0;
    /// Distance of the two children at merge time; 0 on leaves.
    double merge_distance = 0.0;

    bool is_leaf() const noexcept { return left == kNoNode; }
    bool is_root() const noexcept { return parent == kNoNode; }
};

/// Binary merge tree. Leaves are nodes 0..L-1 (one per atomic region, same id as
/// the label); internal nodes follow in merge order, so every child id is smaller
/// than its parent id and iterating ids downwards is a top-down pass.
struct PartitionTree {
    int width = 0;
    int height = 0;
    std::vector<PartitionNode> nodes;
    NodeId root = kNoNode;
    /// Pixel -> leaf node id, row-major.
    std::vector<NodeId> leaf_of_pixel;

    std::size_t node_count() const noexcept { return nodes.size(); }
    std::size_t leaf_count() const noexcept { return (nodes.size() + 1) / 2; }
    const PartitionNode& operator[](NodeId id) const { return nodes.at(id); }

    NodeId sibling(NodeId id) const
    {
        const PartitionNode& n = nodes.at(id);
        if (n.is_root()) return kNoNode;
        const PartitionNode& p = nodes[n.parent];
        return p.left == id ? p.right : p.left;
    }

    NodeId leaf_at(Pixel p) const
    {
        if (p.x < 0 || p.y < 0 || p.x >= width || p.y >= height) {
            throw std::out_of_range("pixel outside tree raster");
        }
        return leaf_of_pixel[static_cast<std::size_t>(p.y) * static_cast<std::size_t>(width) +
                             static_cast<std::size_t>(p.x)];
    }

    /// True iff `ancestor` lies on the leaf-to-root path of `node` (inclusive).
    bool contains(NodeId ancestor, NodeId node) const
    {
        for (NodeId cur = node; cur != kNoNode; cur = nodes[cur].parent) {
            if (cur == ancestor) return true;
            if (cur > ancestor) return false;
        }
        return false;
    }
};

/// Pluggable merge criterion. Must be non-negative and symmetric in (p, q).
template <class F>
concept RegionDistance = requires(const F& f, const RegionStats& s, double strength) {
    { f(s, s, strength) } -> std::convertible_to<double>;
};

/// Default dissimilarity: blend of mean-colour distance and the mean gradient
/// along the shared boundary, (1-lambda)*|mean_p - mean_q| + lambda*strength.
struct ColorEdgeDistance {
    double lambda = 0.5;

    double operator()(const RegionStats& p, const RegionStats& q, double shared_boundary_strength) const
    {
        const double dl = p.mean_lab[0] - q.mean_lab[0];
        const double da = p.mean_lab[1] - q.mean_lab[1];
        const double db = p.mean_lab[2] - q.mean_lab[2];
        return (1.0 - lambda) * std::sqrt(dl * dl + da * da + db * db) + lambda * shared_boundary_strength;
    }

    /// Largest possible drop of the distance to any fixed neighbour when one
    /// region's statistics change from `before` to `after`.
    double decrease_bound(const RegionStats& before, const RegionStats& after) const
    {
        const double dl = after.mean_lab[0] - before.mean_lab[0];
        const double da = after.mean_lab[1] - before.mean_lab[1];
        const double db = after.mean_lab[2] - before.mean_lab[2];
        return std::abs(1.0 - lambda) * std::sqrt(dl * dl + da * da + db * db);
    }
};

/// Distances that can bound their own decrease let the merge engine skip
/// re-evaluating edges that cannot have become the minimum.
template <class F>
concept BoundedRegionDistance = RegionDistance<F> && requires(const F& f, const RegionStats& s) {
    { f.decrease_bound(s, s) } -> std::convertible_to<double>;
};

static_assert(BoundedRegionDistance<ColorEdgeDistance>);

/// Region statistics and region adjacency of an atomic partition.
struct AtomicRegions {
    struct Edge {
        NodeId other;
        std::uint32_t length;    // shared pixel edges
        double strength_sum;     // sum of boundary gradient over those edges
    };

    std::vector<RegionStats> stats;
    std::vector<std::vector<Edge>> adjacency;
};

/// Per-region area, border perimeter, mean Lab, and shared-boundary gradient
/// per neighbouring pair. A boundary pixel edge between p and q contributes
/// (g(p) + g(q)) / 2 to the pair's strength.
inline AtomicRegions collect_regions(const LabelMap& labels, const LabImage& lab, const GradientMap& grad)
{
    const int w = labels.width();
    const int h = labels.height();
    if (!same_shape(labels.labels, lab) || !same_shape(labels.labels, grad)) {
        throw std::invalid_argument("collect_regions: raster dimensions differ");
    }
    const std::size_t R = labels.region_count;
    AtomicRegions out;
    out.stats.assign(R, RegionStats{});
    std::vector<std::array<double, 3>> lab_sum(R, {0.0, 0.0, 0.0});

    // Each pair accumulates in the lower id's list; regions have few neighbours,
    // so a linear scan beats hashing and keeps the access pattern local.
    out.adjacency.assign(R, {});
    auto add_pair = [&](std::uint32_t a, std::uint32_t b, double strength) {
        if (a > b) std::swap(a, b);
        auto& list = out.adjacency[a];
        auto it = std::find_if(list.begin(), list.end(), [b](const AtomicRegions::Edge& e) { return e.other == b; });
        if (it == list.end()) {
            list.push_back({b, 0, 0.0});
            it = list.end() - 1;
        }
        ++it->length;
        it->strength_sum += strength;
    };

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = labels.labels.index(x, y);
            const std::uint32_t l = labels.labels[i];
            if (l >= R) {
                throw std::invalid_argument("collect_regions: label out of range");
            }
            RegionStats& s = out.stats[l];
            ++s.area;
            s.boundary_perimeter += static_cast<std::uint64_t>(x == 0) + (x == w - 1) + (y == 0) + (y == h - 1);
            const Lab& c = lab[i];
            lab_sum[l][0] += c.l;
            lab_sum[l][1] += c.a;
            lab_sum[l][2] += c.b;
            if (x + 1 < w) {
                const std::uint32_t r = labels.labels[i + 1];
                if (r != l) add_pair(l, r, 0.5 * (double(grad[i]) + double(grad[i + 1])));
            }
            if (y + 1 < h) {
                const std::size_t j = i + static_cast<std::size_t>(w);
                const std::uint32_t d = labels.labels[j];
                if (d != l) add_pair(l, d, 0.5 * (double(grad[i]) + double(grad[j])));
            }
        }
    }
    for (std::size_t r = 0; r < R; ++r) {
        if (out.stats[r].area == 0) {
            throw std::invalid_argument("collect_regions: labels are not dense");
        }
        const double a = static_cast<double>(out.stats[r].area);
        out.stats[r].mean_lab = {lab_sum[r][0] / a, lab_sum[r][1] / a, lab_sum[r][2] / a};
    }

    // Mirror to the higher id; only the forward entries of each list are copied.
    std::vector<std::uint32_t> forward(R);
    for (std::size_t r = 0; r < R; ++r) forward[r] = static_cast<std::uint32_t>(out.adjacency[r].size());
    for (std::size_t a = 0; a < R; ++a) {
        for (std::uint32_t k = 0; k < forward[a]; ++k) {
            const AtomicRegions::Edge e = out.adjacency[a][k];
            out.adjacency[e.other].push_back({static_cast<NodeId>(a), e.length, e.strength_sum});
        }
    }
    for (auto& list : out.adjacency) {
        std::sort(list.begin(), list.end(), [](const auto& x, const auto& y) { return x.other < y.other; });
    }
    return out;
}

namespace detail {

/// Exact greedy agglomeration over a region adjacency graph.
///
/// Every region lives in a container. A merge keeps the container with more
/// neighbours and moves the other one's edges into it, so only the smaller
/// side is touched. Adjacency lists hold edge ids and drop dead ones lazily.
/// Each edge is owned by one endpoint and sits in that container's heap.
/// Changing a region's statistics bumps its epoch; entries from older epochs
/// are lower bounds (value minus accumulated decrease bound) and get
/// re-evaluated exactly only when they could be the minimum. Distances without
/// a decrease bound re-evaluate every owned edge on each merge.
template <RegionDistance Distance>
class GreedyMerger {
public:
    GreedyMerger(const LabelMap& labels, AtomicRegions regions, Distance distance)
        : distance_(std::move(distance))
    {
        const std::size_t L = labels.region_count;
        tree_.width = labels.width();
        tree_.height = labels.height();
        tree_.leaf_of_pixel.assign(labels.labels.storage().begin(), labels.labels.storage().end());
        tree_.nodes.reserve(2 * L - 1);
        stats_ = std::move(regions.stats);
        stats_.reserve(2 * L - 1);
        cont_.resize(L);
        seen_.assign(L, 0);
        cand_.resize(L);
        slot_.assign(L, kNone);
        queue_.reserve(L);
        for (NodeId id = 0; id < L; ++id) {
            PartitionNode n;
            n.id = id;
            n.area = stats_[id].area;
            n.boundary_perimeter = stats_[id].boundary_perimeter;
            tree_.nodes.push_back(n);
            cont_[id].node = id;
        }
        for (NodeId a = 0; a < L; ++a) {
            for (const auto& e : regions.adjacency[a]) {
                if (e.other >= L) throw std::invalid_argument("build_tree: adjacency refers to an unknown region");
                if (a >= e.other) continue;
                const auto eid = static_cast<std::uint32_t>(edges_.size());
                edges_.push_back({a, e.other, kNone, e.length, e.strength_sum, 0.0, 0, true});
                cont_[a].adj.push_back(eid);
                cont_[e.other].adj.push_back(eid);
            }
        }
        regions.adjacency.clear();
        for (std::uint32_t eid = 0; eid < edges_.size(); ++eid) {
            const Edge& e = edges_[eid];
            assign(eid, cont_[e.p].adj.size() > cont_[e.q].adj.size() ? e.p : e.q);
        }
        for (std::uint32_t k = 0; k < L; ++k) {
            cont_[k].deg = static_cast<std::uint32_t>(cont_[k].adj.size());
            settle(k);
        }
    }

    PartitionTree run() &&
    {
        std::size_t remaining = cont_.size();
        while (remaining > 1) {
            if (queue_.empty()) {
                throw std::logic_error("build_tree: region adjacency graph is disconnected");
            }
            const std::uint32_t k = queue_.front();
            merge(cont_[k].best, cand_[k].dist);
            --remaining;
        }
        tree_.root = static_cast<NodeId>(tree_.nodes.size() - 1);
        return std::move(tree_);
    }

private:
    static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

    struct Edge {
        std::uint32_t p;  // endpoint containers
        std::uint32_t q;
        std::uint32_t owner;
        std::uint32_t length;
        double strength_sum;
        double dist;
        std::uint32_t version;
        bool alive;
    };
    struct Entry {
        double key;  // dist + owner drift at evaluation
        double dist;
        NodeId nb;   // node id of the non-owner endpoint
        std::uint32_t edge;
        std::uint32_t version;
        std::uint32_t epoch;
    };
    struct EntryWorse {
        bool operator()(const Entry& x, const Entry& y) const noexcept
        {
            if (x.key != y.key) return x.key > y.key;
            return x.nb > y.nb;
        }
    };
    struct Candidate {
        double dist;
        NodeId lo;
        NodeId hi;
    };
    struct Container {
        NodeId node = kNoNode;
        std::vector<std::uint32_t> adj;      // incident edges, dead ones included
        std::uint32_t deg = 0;               // live incident edges
        std::vector<Entry> heap;             // owned edges
        std::vector<std::uint32_t> foreign;  // edges owned by the neighbour (may be stale)
        double drift = 0.0;
        std::uint32_t epoch = 0;
        std::uint32_t best = kNone;
        bool alive = true;
    };

    std::uint32_t other(const Edge& e, std::uint32_t k) const noexcept { return e.p == k ? e.q : e.p; }

    void evaluate(Edge& e)
    {
        const NodeId x = cont_[e.p].node;
        const NodeId y = cont_[e.q].node;
        const double d = static_cast<double>(
            distance_(stats_[std::min(x, y)], stats_[std::max(x, y)], e.strength_sum / e.length));
        e.dist = std::max(d, 0.0);
    }

    void push_entry(std::uint32_t k, std::uint32_t eid)
    {
        Container& c = cont_[k];
        const Edge& e = edges_[eid];
        c.heap.push_back({e.dist + c.drift, e.dist, cont_[other(e, k)].node, eid, e.version, c.epoch});
        std::push_heap(c.heap.begin(), c.heap.end(), EntryWorse{});
    }

    Entry pop_entry(std::uint32_t k)
    {
        auto& h = cont_[k].heap;
        std::pop_heap(h.begin(), h.end(), EntryWorse{});
        const Entry t = h.back();
        h.pop_back();
        return t;
    }

    bool valid(const Entry& t, std::uint32_t k) const noexcept
    {
        const Edge& e = edges_[t.edge];
        return e.alive && e.owner == k && e.version == t.version;
    }

    void assign(std::uint32_t eid, std::uint32_t owner)
    {
        Edge& e = edges_[eid];
        e.owner = owner;
        ++e.version;
        evaluate(e);
        push_entry(owner, eid);
        cont_[other(e, owner)].foreign.push_back(eid);
    }

    void refresh(std::uint32_t k, const Entry& t)
    {
        evaluate(edges_[t.edge]);
        push_entry(k, t.edge);
    }

    /// Establishes the exact best owned edge of container k and publishes it.
    void settle(std::uint32_t k)
    {
        Container& c = cont_[k];
        auto& h = c.heap;
        c.best = kNone;
        for (;;) {
            while (!h.empty() && !valid(h.front(), k)) pop_entry(k);
            if (h.empty()) break;
            if (h.front().epoch != c.epoch) {
                const Entry t = pop_entry(k);
                refresh(k, t);
                continue;
            }
            // Everything whose lower bound comes within rounding of the current
            // minimum is brought up to date before picking.
            const double limit = h.front().key + 1e-9 * (1.0 + std::abs(h.front().key));
            group_.clear();
            stale_.clear();
            while (!h.empty()) {
                if (!valid(h.front(), k)) {
                    pop_entry(k);
                    continue;
                }
                if (h.front().key > limit) break;
                const Entry t = pop_entry(k);
                (t.epoch == c.epoch ? group_ : stale_).push_back(t);
            }
            for (const Entry& t : stale_) refresh(k, t);
            for (const Entry& t : group_) {
                h.push_back(t);
                std::push_heap(h.begin(), h.end(), EntryWorse{});
            }
            if (!stale_.empty()) continue;
            const Entry* b = &group_.front();
            for (const Entry& t : group_) {
                if (t.dist < b->dist || (t.dist == b->dist && t.nb < b->nb)) b = &t;
            }
            c.best = b->edge;
            break;
        }
        if (c.best != kNone) {
            const Edge& e = edges_[c.best];
            const NodeId x = cont_[e.p].node;
            const NodeId y = cont_[e.q].node;
            cand_[k] = {e.dist, std::min(x, y), std::max(x, y)};
            queue_update(k);
        } else {
            queue_erase(k);
        }
    }

    // Indexed min-heap of containers keyed by their published candidate, so the
    // queue never holds more than one entry per container.
    bool before(std::uint32_t x, std::uint32_t y) const noexcept
    {
        const Candidate& a = cand_[x];
        const Candidate& b = cand_[y];
        if (a.dist != b.dist) return a.dist < b.dist;
        if (a.lo != b.lo) return a.lo < b.lo;
        return a.hi < b.hi;
    }

    void queue_place(std::size_t i, std::uint32_t k)
    {
        queue_[i] = k;
        slot_[k] = static_cast<std::uint32_t>(i);
    }

    void sift(std::size_t i)
    {
        const std::uint32_t k = queue_[i];
        while (i > 0) {
            const std::size_t up = (i - 1) / 2;
            if (!before(k, queue_[up])) break;
            queue_place(i, queue_[up]);
            i = up;
        }
        for (;;) {
            std::size_t down = 2 * i + 1;
            if (down >= queue_.size()) break;
            if (down + 1 < queue_.size() && before(queue_[down + 1], queue_[down])) ++down;
            if (!before(queue_[down], k)) break;
            queue_place(i, queue_[down]);
            i = down;
        }
        queue_place(i, k);
    }

    void queue_update(std::uint32_t k)
    {
        if (slot_[k] == kNone) {
            queue_.push_back(k);
            slot_[k] = static_cast<std::uint32_t>(queue_.size() - 1);
        }
        sift(slot_[k]);
    }

    void queue_erase(std::uint32_t k)
    {
        const std::uint32_t i = slot_[k];
        if (i == kNone) return;
        slot_[k] = kNone;
        const std::uint32_t last = queue_.back();
        queue_.pop_back();
        if (last != k) {
            queue_place(i, last);
            sift(i);
        }
    }

    /// Live edge between containers x and y, scanning the shorter list.
    std::uint32_t find_edge(std::uint32_t x, std::uint32_t y) const
    {
        const bool from_x = cont_[x].adj.size() <= cont_[y].adj.size();
        const std::uint32_t self = from_x ? x : y;
        const std::uint32_t want = from_x ? y : x;
        for (std::uint32_t eid : cont_[self].adj) {
            const Edge& e = edges_[eid];
            if (e.alive && other(e, self) == want) return eid;
        }
        return kNone;
    }

    void compact(std::uint32_t k)
    {
        auto& list = cont_[k].adj;
        if (list.size() <= 2 * static_cast<std::size_t>(cont_[k].deg) + 8) return;
        std::erase_if(list, [&](std::uint32_t eid) { return !edges_[eid].alive; });
    }

    void touch(std::uint32_t k)
    {
        if (k == kNone || seen_[k] == stamp_) return;
        seen_[k] = stamp_;
        touched_.push_back(k);
    }

    void merge(std::uint32_t e0, double dist)
    {
        ++stamp_;
        touched_.clear();
        dirty_.clear();
        Edge& join = edges_[e0];
        join.alive = false;
        const std::uint32_t A = join.p;
        const std::uint32_t B = join.q;
        --cont_[A].deg;
        --cont_[B].deg;
        const NodeId a = std::min(cont_[A].node, cont_[B].node);
        const NodeId b = std::max(cont_[A].node, cont_[B].node);
        const auto c = static_cast<NodeId>(tree_.nodes.size());

        RegionStats s;
        s.area = stats_[a].area + stats_[b].area;
        s.boundary_perimeter = stats_[a].boundary_perimeter + stats_[b].boundary_perimeter;
        const double wa = static_cast<double>(stats_[a].area) / static_cast<double>(s.area);
        const double wb = 1.0 - wa;
        for (int k = 0; k < 3; ++k) s.mean_lab[k] = wa * stats_[a].mean_lab[k] + wb * stats_[b].mean_lab[k];
        stats_.push_back(s);

        const std::uint32_t big = cont_[A].deg >= cont_[B].deg ? A : B;
        const std::uint32_t small = big == A ? B : A;
        Container& K = cont_[big];
        Container& S = cont_[small];
        const NodeId before = K.node;
        K.node = c;
        ++K.epoch;
        touch(big);

        for (std::uint32_t eid : S.adj) {
            Edge& e = edges_[eid];
            if (!e.alive) continue;
            const std::uint32_t x = other(e, small);
            touch(e.owner);
            if (const std::uint32_t fid = find_edge(x, big); fid != kNone) {
                Edge& f = edges_[fid];
                f.length += e.length;
                f.strength_sum += e.strength_sum;
                e.alive = false;
                --cont_[x].deg;
                compact(x);
                dirty_.push_back(fid);
            } else {
                (e.p == small ? e.p : e.q) = big;
                K.adj.push_back(eid);
                ++K.deg;
                dirty_.push_back(eid);
            }
        }
        compact(big);
        for (std::uint32_t eid : K.foreign) {
            const Edge& e = edges_[eid];
            if (e.alive && e.owner != big) dirty_.push_back(eid);
        }
        K.foreign.clear();

        if constexpr (BoundedRegionDistance<Distance>) {
            K.drift += static_cast<double>(distance_.decrease_bound(stats_[before], s));
        } else {
            // No bound: bring every owned edge up to date now.
            std::vector<Entry> old;
            old.swap(K.heap);
            for (const Entry& t : old) {
                if (valid(t, big)) refresh(big, t);
            }
        }

        std::sort(dirty_.begin(), dirty_.end());
        dirty_.erase(std::unique(dirty_.begin(), dirty_.end()), dirty_.end());
        for (std::uint32_t eid : dirty_) {
            const Edge& e = edges_[eid];
            const std::uint32_t x = other(e, big);
            touch(e.owner);
            const std::uint32_t owner = cont_[x].deg > K.deg ? x : big;
            assign(eid, owner);
            touch(owner);
        }

        S = Container{};
        S.alive = false;
        queue_erase(small);
        for (std::uint32_t k : touched_) {
            if (cont_[k].alive) settle(k);
        }

        PartitionNode node;
        node.id = c;
        node.left = a;
        node.right = b;
        node.area = s.area;
        node.boundary_perimeter = s.boundary_perimeter;
        node.merge_distance = dist;
        tree_.nodes[a].parent = c;
        tree_.nodes[b].parent = c;
        tree_.nodes.push_back(node);
    }

    Distance distance_;
    PartitionTree tree_;
    std::vector<RegionStats> stats_;
    std::vector<Edge> edges_;
    std::vector<Container> cont_;
    std::vector<Candidate> cand_;
    std::vector<std::uint32_t> queue_;
    std::vector<std::uint32_t> slot_;
    std::vector<std::uint64_t> seen_;
    std::uint64_t stamp_ = 0;
    std::vector<std::uint32_t> touched_;
    std::vector<std::uint32_t> dirty_;
    std::vector<Entry> group_;
    std::vector<Entry> stale_;
};

} // namespace detail

/// Greedy agglomeration over the region adjacency graph.
///
/// Every step merges the globally closest adjacent pair (ties: lexicographically
/// smallest (lower id, higher id)); the merged node's statistics and its edges to all
/// neighbours are recomputed exactly (area-weighted mean colour, length-weighted mean
/// boundary strength).
template <RegionDistance Distance = ColorEdgeDistance>
PartitionTree build_tree(const LabelMap& labels, AtomicRegions regions, Distance distance = {})
{
    const std::size_t L = labels.region_count;
    if (L == 0) {
        throw std::invalid_argument("build_tree: empty label map");
    }
    if (regions.stats.size() != L || regions.adjacency.size() != L) {
        throw std::invalid_argument("build_tree: region statistics do not match the label map");
    }
    return detail::GreedyMerger<Distance>(labels, std::move(regions), std::move(distance)).run();
}

template <RegionDistance Distance = ColorEdgeDistance>
PartitionTree build_tree(const LabelMap& labels, const LabImage& lab, const GradientMap& grad,
                         Distance distance = {})
{
    return build_tree(labels, collect_regions(labels, lab, grad), std::move(distance));
}

/// Contiguous leaf ranges: in a depth-first leaf order, every node covers the
/// half-open interval [first[n], last[n]) of leaf positions.
struct LeafOrder {
    std::vector<std::uint32_t> position_of_leaf;
    std::vector<std::uint32_t> first;
    std::vector<std::uint32_t> last;

    explicit LeafOrder(const PartitionTree& tree)
    {
        const std::size_t n = tree.node_count();
        first.assign(n, 0);
        last.assign(n, 0);
        position_of_leaf.assign(tree.leaf_count(), 0);
        if (n == 0) return;
        std::uint32_t next = 0;
        std::vector<std::pair<NodeId, bool>> stack{{tree.root, false}};
        while (!stack.empty()) {
            auto [id, done] = stack.back();
            stack.pop_back();
            const PartitionNode& node = tree.nodes[id];
            if (done) {
                last[id] = next;
                continue;
            }
            first[id] = next;
            if (node.is_leaf()) {
                position_of_leaf[id] = next++;
                last[id] = next;
                continue;
            }
            stack.push_back({id, true});
            stack.push_back({node.right, false});
            stack.push_back({node.left, false});
        }
    }

    bool covers(NodeId node, NodeId leaf) const noexcept
    {
        const std::uint32_t p = position_of_leaf[leaf];
        return p >= first[node] && p < last[node];
    }
};

} // namespace pats
