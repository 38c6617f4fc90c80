#pragma once

// Leaf level of the partition tree: CIELab conversion, colour gradient and a
// complete (ridge-free) watershed oversegmentation.

#include <pats/image.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace pats {

namespace detail {

inline const std::array<double, 256>& srgb_to_linear_table()
{
    static const std::array<double, 256> table = [] {
        std::array<double, 256> t{};
        for (int i = 0; i < 256; ++i) {
            const double c = i / 255.0;
            t[i] = c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
        }
        return t;
    }();
    return table;
}

inline double lab_f(double t)
{
    constexpr double delta = 6.0 / 29.0;
    return t > delta * delta * delta ? std::cbrt(t) : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

} // namespace detail

/// sRGB (D65) to CIELab.
inline Lab rgb_to_lab(Rgb c)
{
    const auto& lin = detail::srgb_to_linear_table();
    const double r = lin[c.r];
    const double g = lin[c.g];
    const double b = lin[c.b];

    // Reference white is the row sum of the matrix, so (255,255,255) maps to a = b = 0 exactly.
    constexpr double xn = 0.4124564 + 0.3575761 + 0.1804375;
    constexpr double yn = 0.2126729 + 0.7151522 + 0.0721750;
    constexpr double zn = 0.0193339 + 0.1191920 + 0.9503041;
    const double x = (0.4124564 * r + 0.3575761 * g + 0.1804375 * b) / xn;
    const double y = (0.2126729 * r + 0.7151522 * g + 0.0721750 * b) / yn;
    const double z = (0.0193339 * r + 0.1191920 * g + 0.9503041 * b) / zn;

    const double fx = detail::lab_f(x);
    const double fy = detail::lab_f(y);
    const double fz = detail::lab_f(z);
    return {static_cast<float>(116.0 * fy - 16.0), static_cast<float>(500.0 * (fx - fy)),
            static_cast<float>(200.0 * (fy - fz))};
}

inline LabImage to_lab(const ColorImage& img)
{
    LabImage out(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) {
        out[i] = rgb_to_lab(img[i]);
    }
    return out;
}

/// One 3x3 mean filter pass per channel, edge replication at the border.
inline LabImage box_blur(const LabImage& img)
{
    const int w = img.width();
    const int h = img.height();
    LabImage out(w, h);
    for (int y = 0; y < h; ++y) {
        const int y0 = std::max(y - 1, 0);
        const int y2 = std::min(y + 1, h - 1);
        for (int x = 0; x < w; ++x) {
            const int x0 = std::max(x - 1, 0);
            const int x2 = std::min(x + 1, w - 1);
            const int xs[3] = {x0, x, x2};
            const int ys[3] = {y0, y, y2};
            float l = 0.f, a = 0.f, b = 0.f;
            for (int yy : ys) {
                for (int xx : xs) {
                    const Lab& p = img(xx, yy);
                    l += p.l;
                    a += p.a;
                    b += p.b;
                }
            }
            out(x, y) = {l / 9.f, a / 9.f, b / 9.f};
        }
    }
    return out;
}

/// Per-pixel maximum over the Lab channels of the Scharr gradient magnitude.
/// Kernels are normalised by 1/32 so a unit step yields magnitude 0.5.
inline GradientMap color_gradient(const LabImage& img)
{
    const int w = img.width();
    const int h = img.height();
    GradientMap out(w, h);
    for (int y = 0; y < h; ++y) {
        const int ym = std::max(y - 1, 0);
        const int yp = std::min(y + 1, h - 1);
        for (int x = 0; x < w; ++x) {
            const int xm = std::max(x - 1, 0);
            const int xp = std::min(x + 1, w - 1);
            const Lab& tl = img(xm, ym);
            const Lab& tc = img(x, ym);
            const Lab& tr = img(xp, ym);
            const Lab& ml = img(xm, y);
            const Lab& mr = img(xp, y);
            const Lab& bl = img(xm, yp);
            const Lab& bc = img(x, yp);
            const Lab& br = img(xp, yp);

            auto magnitude = [&](auto channel) {
                const float gx = 3.f * (channel(tr) - channel(tl)) + 10.f * (channel(mr) - channel(ml)) +
                                 3.f * (channel(br) - channel(bl));
                const float gy = 3.f * (channel(bl) - channel(tl)) + 10.f * (channel(bc) - channel(tc)) +
                                 3.f * (channel(br) - channel(tr));
                return std::sqrt(gx * gx + gy * gy) / 32.f;
            };
            const float gl = magnitude([](const Lab& p) { return p.l; });
            const float ga = magnitude([](const Lab& p) { return p.a; });
            const float gb = magnitude([](const Lab& p) { return p.b; });
            out(x, y) = std::max({gl, ga, gb});
        }
    }
    return out;
}

/// Optional record of the flooding process, for inspection in tests.
struct WatershedTrace {
    /// Flood level of every queue pop, in pop order.
    std::vector<float> pop_levels;
    /// Number of regional-minimum plateaus found (before 4-connectivity splitting).
    std::uint32_t minima = 0;
};

namespace detail {

/// Dense rank of every value, equal values sharing one; `levels[r]` is the value of
/// rank r. LSD radix sort on an order-preserving integer image of the floats.
inline std::vector<std::uint32_t> value_ranks(const Raster<float>& values, std::vector<float>& levels)
{
    const std::size_t n = values.size();
    std::vector<std::uint32_t> key(n), idx(n), key_tmp(n), idx_tmp(n);
    for (std::size_t i = 0; i < n; ++i) {
        float f = values[i];
        if (std::isnan(f)) throw std::invalid_argument("watershed: gradient contains NaN");
        if (f == 0.f) f = 0.f;  // -0 and +0 compare equal
        const auto bits = std::bit_cast<std::uint32_t>(f);
        key[i] = (bits & 0x80000000u) ? ~bits : (bits | 0x80000000u);
        idx[i] = static_cast<std::uint32_t>(i);
    }
    for (int shift = 0; shift < 32; shift += 8) {
        std::array<std::size_t, 257> start{};
        for (std::uint32_t k : key) ++start[((k >> shift) & 0xffu) + 1];
        if (std::any_of(start.begin() + 1, start.end(), [n](std::size_t c) { return c == n; })) continue;
        for (std::size_t b = 1; b < start.size(); ++b) start[b] += start[b - 1];
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t to = start[(key[i] >> shift) & 0xffu]++;
            key_tmp[to] = key[i];
            idx_tmp[to] = idx[i];
        }
        key.swap(key_tmp);
        idx.swap(idx_tmp);
    }
    std::vector<std::uint32_t> rank(n);
    levels.clear();
    for (std::size_t k = 0; k < n; ++k) {
        if (k == 0 || key[k] != key[k - 1]) levels.push_back(values[idx[k]]);
        rank[idx[k]] = static_cast<std::uint32_t>(levels.size() - 1);
    }
    return rank;
}

/// Dense relabelling of 4-connected components of `labels`, in raster order of first occurrence.
inline std::uint32_t relabel_4_connected(Raster<std::uint32_t>& labels)
{
    constexpr std::uint32_t unset = std::numeric_limits<std::uint32_t>::max();
    const int w = labels.width();
    const int h = labels.height();
    Raster<std::uint32_t> out(w, h, unset);
    std::vector<std::size_t> stack;
    std::uint32_t next = 0;
    for (std::size_t start = 0; start < labels.size(); ++start) {
        if (out[start] != unset) {
            continue;
        }
        const std::uint32_t src = labels[start];
        out[start] = next;
        stack.push_back(start);
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            const int x = static_cast<int>(i % static_cast<std::size_t>(w));
            const int y = static_cast<int>(i / static_cast<std::size_t>(w));
            auto visit = [&](std::size_t j) {
                if (out[j] == unset && labels[j] == src) {
                    out[j] = next;
                    stack.push_back(j);
                }
            };
            if (x > 0) visit(i - 1);
            if (x + 1 < w) visit(i + 1);
            if (y > 0) visit(i - static_cast<std::size_t>(w));
            if (y + 1 < h) visit(i + static_cast<std::size_t>(w));
        }
        ++next;
    }
    labels = std::move(out);
    return next;
}

} // namespace detail

/// Flooding watershed from regional-minimum plateaus.
///
/// Plateaus are 8-connected sets of equal magnitude; a plateau seeds a basin iff
/// none of its pixels has a strictly lower 8-neighbour. Flooding proceeds over
/// 4-neighbours in order of (flood level, arrival), where
/// the flood level of a pixel is max(own magnitude, level of the pixel that reached
/// it). A pixel joins the first basin that reaches it, so no ridge pixels remain.
/// Seeds enter the queue grouped by basin id, which resolves equal-time arrivals in
/// favour of the lower id. Any basin whose seed plateau was only diagonally connected
/// is finally split into its 4-connected components.
inline LabelMap watershed(const GradientMap& grad, WatershedTrace* trace = nullptr)
{
    constexpr std::uint32_t unset = std::numeric_limits<std::uint32_t>::max();
    const int w = grad.width();
    const int h = grad.height();
    const std::size_t n = grad.size();
    const auto W = static_cast<std::size_t>(w);

    // 8-connected plateaus and their minimum status.
    std::vector<std::uint32_t> plateau(n, unset);
    std::vector<std::uint32_t> seed_of_plateau;
    std::vector<std::size_t> stack;
    std::vector<std::size_t> members;
    std::uint32_t minima = 0;
    std::uint32_t plateau_count = 0;
    for (std::size_t start = 0; start < n; ++start) {
        if (plateau[start] != unset) {
            continue;
        }
        const float level = grad[start];
        const std::uint32_t id = plateau_count++;
        bool is_minimum = true;
        members.clear();
        plateau[start] = id;
        stack.push_back(start);
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            members.push_back(i);
            const int x = static_cast<int>(i % W);
            const int y = static_cast<int>(i / W);
            for (int dy = -1; dy <= 1; ++dy) {
                const int yy = y + dy;
                if (yy < 0 || yy >= h) continue;
                for (int dx = -1; dx <= 1; ++dx) {
                    const int xx = x + dx;
                    if ((dx == 0 && dy == 0) || xx < 0 || xx >= w) continue;
                    const std::size_t j = static_cast<std::size_t>(yy) * W + static_cast<std::size_t>(xx);
                    const float v = grad[j];
                    if (v < level) {
                        is_minimum = false;
                    } else if (v == level && plateau[j] == unset) {
                        plateau[j] = id;
                        stack.push_back(j);
                    }
                }
            }
        }
        seed_of_plateau.push_back(is_minimum ? minima++ : unset);
    }

    Raster<std::uint32_t> labels(w, h, unset);
    for (std::size_t i = 0; i < n; ++i) {
        labels[i] = seed_of_plateau[plateau[i]];
    }

    // Bucket queue over value ranks with one FIFO per rank: pops come out by
    // ascending level, then push order. Each pixel is queued at most once.
    std::vector<float> levels;
    const std::vector<std::uint32_t> rank = detail::value_ranks(grad, levels);
    std::vector<std::uint32_t> head(levels.size(), unset), tail(levels.size(), unset), next(n, unset);
    auto push = [&](std::uint32_t r, std::uint32_t i) {
        if (head[r] == unset) {
            head[r] = i;
        } else {
            next[tail[r]] = i;
        }
        tail[r] = i;
    };

    auto has_unlabeled_neighbor = [&](std::size_t i) {
        const std::size_t x = i % W;
        const std::size_t y = i / W;
        return (x > 0 && labels[i - 1] == unset) || (x + 1 < W && labels[i + 1] == unset) ||
               (y > 0 && labels[i - W] == unset) ||
               (y + 1 < static_cast<std::size_t>(h) && labels[i + W] == unset);
    };

    // Seed frontier, grouped by basin id.
    {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> frontier;
        for (std::size_t i = 0; i < n; ++i) {
            if (labels[i] != unset && has_unlabeled_neighbor(i)) {
                frontier.emplace_back(labels[i], static_cast<std::uint32_t>(i));
            }
        }
        std::sort(frontier.begin(), frontier.end());
        for (auto [label, index] : frontier) {
            push(rank[index], index);
        }
    }

    if (trace) {
        trace->pop_levels.clear();
        trace->minima = minima;
    }
    for (std::uint32_t r = 0; r < levels.size();) {
        const std::uint32_t i = head[r];
        if (i == unset) {
            ++r;
            continue;
        }
        head[r] = next[i];
        if (trace) {
            trace->pop_levels.push_back(levels[r]);
        }
        const std::uint32_t label = labels[i];
        const std::size_t x = i % W;
        const std::size_t y = i / W;
        auto reach = [&](std::size_t j) {
            if (labels[j] == unset) {
                labels[j] = label;
                push(std::max(rank[j], r), static_cast<std::uint32_t>(j));
            }
        };
        if (x > 0) reach(i - 1);
        if (x + 1 < W) reach(i + 1);
        if (y > 0) reach(i - W);
        if (y + 1 < static_cast<std::size_t>(h)) reach(i + W);
    }

    LabelMap out;
    out.region_count = detail::relabel_4_connected(labels);
    out.labels = std::move(labels);
    return out;
}

} // namespace pats
