#pragma once

// Generators and brute-force oracles shared by the unit and acceptance suites.
// The oracles deliberately avoid the library's fast paths.

#include <pats/pats.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

namespace pats::support {

/// Random binary tree over a w x h raster. Leaves get >= 1 pixel each (not
/// necessarily connected); merges pair random current roots. With `quantized`,
/// merge distances are drawn from {0, 0.5, 1} so exact ties occur.
inline PartitionTree random_tree(std::mt19937_64& rng, int w, int h, std::size_t leaves, bool quantized = false)
{
    const std::size_t pixels = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    leaves = std::clamp<std::size_t>(leaves, 1, pixels);
    PartitionTree t;
    t.width = w;
    t.height = h;
    std::vector<std::size_t> order(pixels);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    t.leaf_of_pixel.assign(pixels, 0);
    std::uniform_int_distribution<std::size_t> pick_leaf(0, leaves - 1);
    for (std::size_t k = 0; k < pixels; ++k) {
        t.leaf_of_pixel[order[k]] = static_cast<NodeId>(k < leaves ? k : pick_leaf(rng));
    }
    t.nodes.resize(leaves);
    for (NodeId id = 0; id < leaves; ++id) t.nodes[id].id = id;
    for (std::size_t p = 0; p < pixels; ++p) {
        const int x = static_cast<int>(p % static_cast<std::size_t>(w));
        const int y = static_cast<int>(p / static_cast<std::size_t>(w));
        PartitionNode& n = t.nodes[t.leaf_of_pixel[p]];
        ++n.area;
        n.boundary_perimeter += static_cast<std::uint64_t>(x == 0) + (x == w - 1) + (y == 0) + (y == h - 1);
    }
    std::vector<NodeId> roots(leaves);
    std::iota(roots.begin(), roots.end(), 0);
    std::uniform_real_distribution<double> dist(0.0, 2.0);
    std::uniform_int_distribution<int> level(0, 2);
    while (roots.size() > 1) {
        std::uniform_int_distribution<std::size_t> pick(0, roots.size() - 1);
        const std::size_t i = pick(rng);
        std::swap(roots[i], roots.back());
        const NodeId a = roots.back();
        roots.pop_back();
        std::uniform_int_distribution<std::size_t> pick2(0, roots.size() - 1);
        const std::size_t j = pick2(rng);
        const NodeId b = roots[j];
        PartitionNode n;
        n.id = static_cast<NodeId>(t.nodes.size());
        n.left = std::min(a, b);
        n.right = std::max(a, b);
        n.area = t.nodes[a].area + t.nodes[b].area;
        n.boundary_perimeter = t.nodes[a].boundary_perimeter + t.nodes[b].boundary_perimeter;
        n.merge_distance = quantized ? 0.5 * level(rng) : dist(rng);
        t.nodes[a].parent = n.id;
        t.nodes[b].parent = n.id;
        roots[j] = n.id;
        t.nodes.push_back(n);
    }
    t.root = static_cast<NodeId>(t.nodes.size() - 1);
    return t;
}

struct NaiveMerge {
    NodeId left;
    NodeId right;
    double distance;
};

/// Greedy agglomeration that rebuilds the whole region adjacency from the pixels
/// before every merge and scans all pairs. Ties go to the smallest (lower, higher) pair.
template <class Distance>
std::vector<NaiveMerge> naive_greedy(const LabelMap& labels, const LabImage& lab, const GradientMap& grad,
                                     const Distance& distance)
{
    const int w = labels.width(), h = labels.height();
    const std::size_t R = labels.region_count;
    std::vector<RegionStats> stats(R);
    std::vector<std::array<double, 3>> sum(R, {0.0, 0.0, 0.0});
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::uint32_t l = labels.labels(x, y);
            ++stats[l].area;
            stats[l].boundary_perimeter += static_cast<std::uint64_t>(x == 0) + (x == w - 1) + (y == 0) + (y == h - 1);
            sum[l][0] += lab(x, y).l;
            sum[l][1] += lab(x, y).a;
            sum[l][2] += lab(x, y).b;
        }
    }
    for (std::size_t r = 0; r < R; ++r) {
        for (int k = 0; k < 3; ++k) stats[r].mean_lab[k] = sum[r][k] / static_cast<double>(stats[r].area);
    }
    std::vector<NodeId> node_of(R);
    std::iota(node_of.begin(), node_of.end(), 0);
    std::vector<NaiveMerge> out;
    for (std::size_t step = 0; step + 1 < R; ++step) {
        std::map<std::pair<NodeId, NodeId>, std::pair<std::uint32_t, double>> pairs;
        auto visit = [&](int x0, int y0, int x1, int y1) {
            NodeId u = node_of[labels.labels(x0, y0)], v = node_of[labels.labels(x1, y1)];
            if (u == v) return;
            if (u > v) std::swap(u, v);
            auto& acc = pairs[{u, v}];
            ++acc.first;
            acc.second += 0.5 * (double(grad(x0, y0)) + double(grad(x1, y1)));
        };
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                if (x + 1 < w) visit(x, y, x + 1, y);
                if (y + 1 < h) visit(x, y, x, y + 1);
            }
        }
        double best = std::numeric_limits<double>::infinity();
        std::pair<NodeId, NodeId> pick{};
        for (const auto& [key, acc] : pairs) {
            const double d = std::max(0.0, static_cast<double>(distance(stats[key.first], stats[key.second],
                                                                         acc.second / acc.first)));
            if (d < best) {
                best = d;
                pick = key;
            }
        }
        const auto [a, b] = pick;
        RegionStats s;
        s.area = stats[a].area + stats[b].area;
        s.boundary_perimeter = stats[a].boundary_perimeter + stats[b].boundary_perimeter;
        const double wa = static_cast<double>(stats[a].area) / static_cast<double>(s.area);
        const double wb = 1.0 - wa;
        for (int k = 0; k < 3; ++k) s.mean_lab[k] = wa * stats[a].mean_lab[k] + wb * stats[b].mean_lab[k];
        const auto c = static_cast<NodeId>(stats.size());
        stats.push_back(s);
        for (auto& n : node_of) {
            if (n == a || n == b) n = c;
        }
        out.push_back({a, b, best});
    }
    return out;
}

struct ManualMerge {
    NodeId left;
    NodeId right;
    double distance;
};

/// Tree with the given leaf areas (pixels assigned in raster order over a
/// w x h image), zero border unless given, and merges in order.
inline PartitionTree manual_tree(int w, int h, const std::vector<std::uint64_t>& areas,
                                 const std::vector<ManualMerge>& merges, const std::vector<std::uint64_t>& border = {})
{
    PartitionTree t;
    t.width = w;
    t.height = h;
    for (NodeId id = 0; id < areas.size(); ++id) {
        PartitionNode n;
        n.id = id;
        n.area = areas[id];
        n.boundary_perimeter = border.empty() ? 0 : border[id];
        t.nodes.push_back(n);
        t.leaf_of_pixel.insert(t.leaf_of_pixel.end(), areas[id], id);
    }
    for (const ManualMerge& m : merges) {
        PartitionNode n;
        n.id = static_cast<NodeId>(t.nodes.size());
        n.left = m.left;
        n.right = m.right;
        n.area = t.nodes[m.left].area + t.nodes[m.right].area;
        n.boundary_perimeter = t.nodes[m.left].boundary_perimeter + t.nodes[m.right].boundary_perimeter;
        n.merge_distance = m.distance;
        t.nodes[m.left].parent = n.id;
        t.nodes[m.right].parent = n.id;
        t.nodes.push_back(n);
    }
    t.root = static_cast<NodeId>(t.nodes.size() - 1);
    return t;
}

/// Per-leaf path maximum by walking parent links; first strict maximum from the
/// leaf upwards, i.e. the deepest node attaining it.
struct PathMax {
    std::vector<double> value;
    std::vector<NodeId> node;
};

inline PathMax brute_force_path_max(const PartitionTree& t, const std::vector<double>& s_hier)
{
    PathMax out;
    out.value.assign(t.node_count(), 0.0);
    out.node.assign(t.node_count(), kNoNode);
    for (NodeId leaf = 0; leaf < t.node_count(); ++leaf) {
        if (!t.nodes[leaf].is_leaf()) continue;
        double best = -std::numeric_limits<double>::infinity();
        NodeId arg = kNoNode;
        for (NodeId cur = leaf; cur != kNoNode; cur = t.nodes[cur].parent) {
            if (s_hier[cur] > best) {
                best = s_hier[cur];
                arg = cur;
            }
        }
        out.value[leaf] = best;
        out.node[leaf] = arg;
    }
    return out;
}

/// Pixel membership in a node by walking the pixel's leaf up to the root.
inline bool pixel_in_node(const PartitionTree& t, std::size_t pixel, NodeId node)
{
    for (NodeId cur = t.leaf_of_pixel[pixel]; cur != kNoNode; cur = t.nodes[cur].parent) {
        if (cur == node) return true;
    }
    return false;
}

/// Recount of all 257 binarizations, one full confusion pass each.
inline ThresholdResult naive_best_threshold(const GrayImage& sal, const BinaryMask& gt, Measure m,
                                            double beta2 = kDefaultBeta2)
{
    ThresholdResult best;
    bool have = false;
    for (int t = 0; t <= 256; ++t) {
        const ConfusionCounts c = confusion(threshold_map(sal, t), gt);
        const Score s = score(c, m, beta2);
        if (!have || s.value > best.score) {
            best = {t, s.value, s.degenerate, c};
            have = true;
        }
    }
    return best;
}

/// Synthetic scene: uniform background with distinctly coloured axis-aligned
/// rectangles and ellipses. `mask` marks every shape pixel.
struct Scene {
    ColorImage image;
    BinaryMask mask;
    std::vector<BinaryMask> shapes;
};

inline double rgb_distance(Rgb a, Rgb b)
{
    const double dr = double(a.r) - b.r, dg = double(a.g) - b.g, db = double(a.b) - b.b;
    return std::sqrt(dr * dr + dg * dg + db * db);
}

inline Rgb random_color(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> c(0, 255);
    return {static_cast<std::uint8_t>(c(rng)), static_cast<std::uint8_t>(c(rng)), static_cast<std::uint8_t>(c(rng))};
}

inline Rgb distinct_color(std::mt19937_64& rng, const std::vector<Rgb>& avoid, double min_distance)
{
    for (int attempt = 0; attempt < 10000; ++attempt) {
        const Rgb c = random_color(rng);
        bool ok = true;
        for (const Rgb& o : avoid) ok = ok && rgb_distance(c, o) >= min_distance;
        if (ok) return c;
    }
    throw std::runtime_error("distinct_color: no colour found");
}

struct ShapeSpec {
    bool ellipse = false;
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // inclusive bounding box
    Rgb color;
};

inline BinaryMask draw_shape(int w, int h, const ShapeSpec& s)
{
    BinaryMask m(w, h, 0);
    const double cx = 0.5 * (s.x0 + s.x1), cy = 0.5 * (s.y0 + s.y1);
    const double rx = 0.5 * (s.x1 - s.x0 + 1), ry = 0.5 * (s.y1 - s.y0 + 1);
    for (int y = std::max(s.y0, 0); y <= std::min(s.y1, h - 1); ++y) {
        for (int x = std::max(s.x0, 0); x <= std::min(s.x1, w - 1); ++x) {
            if (s.ellipse) {
                const double dx = (x - cx) / rx, dy = (y - cy) / ry;
                if (dx * dx + dy * dy > 1.0) continue;
            }
            m(x, y) = 1;
        }
    }
    return m;
}

inline Scene render_scene(int w, int h, Rgb background, const std::vector<ShapeSpec>& shapes)
{
    Scene sc{ColorImage(w, h, background), BinaryMask(w, h, 0), {}};
    for (const auto& s : shapes) {
        BinaryMask m = draw_shape(w, h, s);
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (m[i]) {
                sc.image[i] = s.color;
                sc.mask[i] = 1;
            }
        }
        sc.shapes.push_back(std::move(m));
    }
    return sc;
}

/// 1-3 non-overlapping shapes (gap >= 6 px) on a uniform background; with
/// `allow_border`, a shape may touch the image border.
inline Scene random_scene(std::mt19937_64& rng, int w, int h, bool allow_border)
{
    const Rgb bg = random_color(rng);
    std::uniform_int_distribution<int> count(1, 3);
    const int n = count(rng);
    std::vector<ShapeSpec> shapes;
    std::vector<Rgb> used{bg};
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<int> size(std::max(12, std::min(w, h) / 8), std::max(16, std::min(w, h) / 3));
    auto overlaps = [&](const ShapeSpec& s) {
        for (const auto& o : shapes) {
            if (s.x0 - 6 <= o.x1 && o.x0 - 6 <= s.x1 && s.y0 - 6 <= o.y1 && o.y0 - 6 <= s.y1) return true;
        }
        return false;
    };
    for (int k = 0; k < n; ++k) {
        for (int attempt = 0; attempt < 200; ++attempt) {
            ShapeSpec s;
            s.ellipse = coin(rng);
            const int sw = size(rng), sh = size(rng);
            const bool border = allow_border && coin(rng) && coin(rng);
            const int margin = border ? 0 : 4;
            std::uniform_int_distribution<int> px(margin, w - sw - margin), py(margin, h - sh - margin);
            s.x0 = px(rng);
            s.y0 = py(rng);
            if (border) {
                // Snap to one side.
                switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
                case 0: s.x0 = 0; break;
                case 1: s.x0 = w - sw; break;
                case 2: s.y0 = 0; break;
                default: s.y0 = h - sh; break;
                }
                s.ellipse = false;
            }
            s.x1 = s.x0 + sw - 1;
            s.y1 = s.y0 + sh - 1;
            if (overlaps(s)) continue;
            s.color = distinct_color(rng, used, 120.0);
            used.push_back(s.color);
            shapes.push_back(s);
            break;
        }
    }
    return render_scene(w, h, bg, shapes);
}

/// Mildly textured image: smooth colour field plus per-pixel noise, with a few shapes.
inline ColorImage textured_image(std::mt19937_64& rng, int w, int h)
{
    ColorImage img(w, h);
    std::uniform_real_distribution<double> phase(0.0, 6.283);
    const double p1 = phase(rng), p2 = phase(rng), p3 = phase(rng);
    std::normal_distribution<double> noise(0.0, 6.0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double u = double(x) / w, v = double(y) / h;
            auto ch = [&](double base, double ph) {
                const double val = base + 60.0 * std::sin(6.0 * u + ph) * std::cos(4.0 * v + ph) + noise(rng);
                return static_cast<std::uint8_t>(std::clamp(val, 0.0, 255.0));
            };
            img(x, y) = {ch(120, p1), ch(110, p2), ch(100, p3)};
        }
    }
    std::uniform_int_distribution<int> cx(0, w - 1), cy(0, h - 1), r(std::max(3, w / 20), std::max(4, w / 6));
    for (int k = 0; k < 6; ++k) {
        const int x0 = cx(rng), y0 = cy(rng), rad = r(rng);
        const Rgb c = random_color(rng);
        for (int y = std::max(0, y0 - rad); y < std::min(h, y0 + rad); ++y) {
            for (int x = std::max(0, x0 - rad); x < std::min(w, x0 + rad); ++x) {
                if ((x - x0) * (x - x0) + (y - y0) * (y - y0) <= rad * rad) img(x, y) = c;
            }
        }
    }
    return img;
}

/// Textured image whose statistics do not depend on its size: colour waves with a
/// 100 px period plus per-pixel noise, and one disc per 15000 pixels.
inline ColorImage stationary_texture(std::mt19937_64& rng, int w, int h)
{
    ColorImage img(w, h);
    std::uniform_real_distribution<double> phase(0.0, 6.283);
    const double p1 = phase(rng), p2 = phase(rng), p3 = phase(rng);
    std::normal_distribution<double> noise(0.0, 6.0);
    const double k = 2.0 * std::numbers::pi / 100.0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            auto ch = [&](double base, double ph) {
                const double val = base + 60.0 * std::sin(k * x + ph) * std::cos(k * y + ph) + noise(rng);
                return static_cast<std::uint8_t>(std::clamp(val, 0.0, 255.0));
            };
            img(x, y) = {ch(120, p1), ch(110, p2), ch(100, p3)};
        }
    }
    const int discs = std::max(1, static_cast<int>(std::lround(w * h / 15000.0)));
    std::uniform_int_distribution<int> cx(0, w - 1), cy(0, h - 1), r(8, 30);
    for (int d = 0; d < discs; ++d) {
        const int x0 = cx(rng), y0 = cy(rng), rad = r(rng);
        const Rgb c = random_color(rng);
        for (int y = std::max(0, y0 - rad); y < std::min(h, y0 + rad); ++y) {
            for (int x = std::max(0, x0 - rad); x < std::min(w, x0 + rad); ++x) {
                if ((x - x0) * (x - x0) + (y - y0) * (y - y0) <= rad * rad) img(x, y) = c;
            }
        }
    }
    return img;
}

/// Plane through `origin` spanned by unit vectors a and b, sampled on a w x h grid
/// with `step` spacing and centred on the origin. Optional Gaussian noise along a x b.
inline OrderedPointCloud plane_cloud(int w, int h, const Vec3& origin, const Vec3& a, const Vec3& b, double step,
                                     std::mt19937_64* rng = nullptr, double sigma = 0.0)
{
    OrderedPointCloud c(w, h);
    const Vec3 n = a.cross(b).normalized();
    std::normal_distribution<double> noise(0.0, sigma > 0 ? sigma : 1.0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            Vec3 p = origin + (x - (w - 1) / 2.0) * step * a + (y - (h - 1) / 2.0) * step * b;
            if (rng && sigma > 0) p += noise(*rng) * n;
            c.at(x, y) = p;
        }
    }
    return c;
}

/// Box seen from a sensor at the origin looking along +y: image rows [0, h/2) are the
/// top face (z = top, y from far to near), the rest the front face (y = front, z
/// downwards). Columns span x in [-size/2, size/2].
struct BoxScene {
    OrderedPointCloud cloud;
    BinaryMask mask;
    double top;
    double bottom;
    double front;
};

inline BoxScene box_scene(int w = 40, int h = 40, double size = 0.1, double front = 0.8, double top = -0.2)
{
    BoxScene s{OrderedPointCloud(w, h), BinaryMask(w, h, 1), top, top - size, front};
    const int half = h / 2;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double px = -size / 2 + size * x / (w - 1);
            if (y < half) {
                s.cloud.at(x, y) = {px, front + size - size * y / (half - 1), top};
            } else {
                s.cloud.at(x, y) = {px, front, top - size * (y - half) / (h - half - 1)};
            }
        }
    }
    return s;
}

/// Sensor-facing half of an upright cylinder: columns sweep the visible arc,
/// rows run from the top rim (z = top) down to the base.
inline OrderedPointCloud cylinder_cloud(int w, int h, double radius, double height, const Vec3& base_centre, double top)
{
    OrderedPointCloud c(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double phi = std::numbers::pi * (0.05 + 0.9 * x / (w - 1));
            const double z = top - height * y / (h - 1);
            c.at(x, y) = base_centre + Vec3(radius * std::cos(phi), -radius * std::sin(phi), 0.0) + Vec3(0, 0, z);
        }
    }
    return c;
}

/// Unit vector tilted from +z by `deg` towards azimuth `az` (radians).
inline Vec3 tilted_up(double deg, double az = 0.0)
{
    const double t = deg * std::numbers::pi / 180.0;
    return {std::sin(t) * std::cos(az), std::sin(t) * std::sin(az), std::cos(t)};
}

/// Brute-force min-extent over angles in [0, 180) at `step_deg`.
inline std::pair<double, double> sweep_min_extent(const std::vector<Vec2>& pts, double step_deg = 0.1)
{
    double best_w = std::numeric_limits<double>::infinity(), best_a = 0.0;
    const int steps = static_cast<int>(std::lround(180.0 / step_deg));
    for (int i = 0; i < steps; ++i) {
        const double a = i * step_deg * std::numbers::pi / 180.0;
        const Vec2 d(std::cos(a), std::sin(a));
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& p : pts) {
            lo = std::min(lo, p.dot(d));
            hi = std::max(hi, p.dot(d));
        }
        if (hi - lo < best_w) {
            best_w = hi - lo;
            best_a = a;
        }
    }
    return {best_a, best_w};
}

/// Difference of two angles modulo pi, in [0, pi/2].
inline double angle_diff_mod_pi(double a, double b)
{
    double d = std::fmod(std::abs(a - b), std::numbers::pi);
    return std::min(d, std::numbers::pi - d);
}

/// Per-pixel evaluation of the mask definition by walking each pixel's ancestry.
inline BinaryMask brute_force_mask(const Segmentation& seg, std::optional<NodeId> active, const std::set<NodeId>& add,
                                   const std::set<NodeId>& sub)
{
    BinaryMask m(seg.width(), seg.height(), 0);
    for (std::size_t p = 0; p < m.size(); ++p) {
        bool in = active && pixel_in_node(seg.tree, p, *active);
        for (NodeId n : add) in = in || pixel_in_node(seg.tree, p, n);
        for (NodeId n : sub) in = in && !pixel_in_node(seg.tree, p, n);
        m[p] = in;
    }
    return m;
}

inline Pixel pixel_of(const Segmentation& seg, std::size_t p)
{
    return {static_cast<int>(p % static_cast<std::size_t>(seg.width())),
            static_cast<int>(p / static_cast<std::size_t>(seg.width()))};
}

inline Pixel pixel_in_leaf_of(const Segmentation& seg, NodeId node)
{
    for (std::size_t p = 0; p < seg.tree.leaf_of_pixel.size(); ++p) {
        if (pixel_in_node(seg.tree, p, node)) return pixel_of(seg, p);
    }
    throw std::logic_error("node without pixels");
}

} // namespace pats::support
