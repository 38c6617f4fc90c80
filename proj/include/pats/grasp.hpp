#pragma once

// Grasp pose parameters from a selected object mask, a grasp click and an
// ordered point cloud. Geometry only: no planning, no hardware.

#include <pats/image.hpp>
#include <pats/point_cloud.hpp>
#include <pats/selection.hpp>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pats {

using Vec2 = Eigen::Vector2d;

/// Geometry precondition failure; the operator should pick a different grasp point.
class GraspError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GraspParams {
    double top_threshold_deg = 25.0;
    double normal_radius = 0.02;
    double inlier_band = 0.005;
    std::size_t min_neighbors = 10;
    std::size_t outlier_k = 8;
    double outlier_stddev = 2.0;
    /// A point is only an outlier if its k-NN distance also exceeds this multiple of
    /// the median, so regular grid borders survive.
    double outlier_median_factor = 2.0;
    double approach_length = 0.12;
};

enum class GraspType { Top, Side };

inline const char* grasp_type_name(GraspType t) { return t == GraspType::Top ? "top" : "side"; }

inline Vec3 default_gravity() { return {0.0, 0.0, -1.0}; }

// ---------------------------------------------------------------------------
// Cloud filtering

namespace detail {

/// Mean distance of every point to its k nearest others. Sweep over x-sorted
/// order with early exit once |dx| exceeds the current k-th best.
inline std::vector<double> mean_knn_distance(const std::vector<Vec3>& pts, std::size_t k)
{
    const std::size_t n = pts.size();
    std::vector<double> out(n, 0.0);
    if (n < 2) return out;
    k = std::min(k, n - 1);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pts[a].x() < pts[b].x(); });

    std::priority_queue<double> best;  // squared distances, max on top
    for (std::size_t pos = 0; pos < n; ++pos) {
        const Vec3& p = pts[order[pos]];
        while (!best.empty()) best.pop();
        auto consider = [&](std::size_t j) {
            const double d2 = (pts[order[j]] - p).squaredNorm();
            if (best.size() < k) {
                best.push(d2);
            } else if (d2 < best.top()) {
                best.pop();
                best.push(d2);
            }
        };
        std::size_t lo = pos, hi = pos + 1;
        bool left = pos > 0, right = hi < n;
        while (left || right) {
            const double bound = best.size() < k ? std::numeric_limits<double>::infinity() : best.top();
            if (left) {
                const double dx = p.x() - pts[order[lo - 1]].x();
                if (dx * dx > bound) {
                    left = false;
                } else {
                    consider(--lo);
                    left = lo > 0;
                }
            }
            if (right) {
                const double bound2 = best.size() < k ? std::numeric_limits<double>::infinity() : best.top();
                const double dx = pts[order[hi]].x() - p.x();
                if (dx * dx > bound2) {
                    right = false;
                } else {
                    consider(hi++);
                    right = hi < n;
                }
            }
        }
        double sum = 0.0;
        const std::size_t m = best.size();
        while (!best.empty()) {
            sum += std::sqrt(best.top());
            best.pop();
        }
        out[order[pos]] = m ? sum / static_cast<double>(m) : 0.0;
    }
    return out;
}

} // namespace detail

/// Statistical outlier removal over the valid points inside `mask`: a point is
/// invalidated when its mean distance to its k nearest masked neighbours exceeds
/// mean + stddev_mul * sigma of that statistic (and the median-factor floor).
inline OrderedPointCloud filter_cloud(const OrderedPointCloud& cloud, const BinaryMask& mask,
                                      const GraspParams& params = {})
{
    if (!cloud.matches(mask)) throw std::invalid_argument("filter_cloud: mask and cloud dimensions differ");
    std::vector<Vec3> pts;
    std::vector<std::size_t> where;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (mask[i] && cloud.valid(i)) {
            pts.push_back(cloud[i]);
            where.push_back(i);
        }
    }
    OrderedPointCloud out = cloud;
    if (pts.size() <= params.outlier_k) return out;
    const std::vector<double> d = detail::mean_knn_distance(pts, params.outlier_k);
    double mean = 0.0;
    for (double v : d) mean += v;
    mean /= static_cast<double>(d.size());
    double var = 0.0;
    for (double v : d) var += (v - mean) * (v - mean);
    const double sigma = std::sqrt(var / static_cast<double>(d.size()));
    std::vector<double> sorted = d;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double median = sorted[sorted.size() / 2];
    const double limit = std::max(mean + params.outlier_stddev * sigma, params.outlier_median_factor * median);
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d[i] > limit) out.invalidate(where[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Plane fit

struct PlaneFit {
    Vec3 normal;    // unit, facing the sensor origin
    Vec3 centroid;  // of the fit neighbourhood
    Vec3 clicked;   // 3D point under the click
    std::vector<Vec3> neighborhood;
    /// Valid mask points within the inlier band of the plane.
    std::vector<Vec3> inliers;
};

/// Least-squares plane through the masked points within `normal_radius` of the
/// clicked point (smallest principal axis of their covariance).
inline PlaneFit surface_normal(const OrderedPointCloud& cloud, const BinaryMask& mask, Pixel click,
                               const GraspParams& params = {})
{
    if (!cloud.matches(mask)) throw std::invalid_argument("surface_normal: mask and cloud dimensions differ");
    if (!mask.contains(click)) throw std::out_of_range("surface_normal: click outside the image");
    const std::size_t ci = cloud.index(click.x, click.y);
    if (!cloud.valid(ci)) throw GraspError("no depth at the grasp point; choose a different grasp point");

    PlaneFit fit;
    fit.clicked = cloud[ci];
    const double r2 = params.normal_radius * params.normal_radius;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (mask[i] && cloud.valid(i) && (cloud[i] - fit.clicked).squaredNorm() <= r2) {
            fit.neighborhood.push_back(cloud[i]);
        }
    }
    if (fit.neighborhood.size() < params.min_neighbors) {
        throw GraspError("too few surface points around the grasp point; choose a different grasp point");
    }
    Vec3 c = Vec3::Zero();
    for (const auto& p : fit.neighborhood) c += p;
    c /= static_cast<double>(fit.neighborhood.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& p : fit.neighborhood) {
        const Vec3 d = p - c;
        cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    Vec3 n = eig.eigenvectors().col(0).normalized();
    if (n.dot(-c) < 0.0) n = -n;
    fit.normal = n;
    fit.centroid = c;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (mask[i] && cloud.valid(i) && std::abs(n.dot(cloud[i] - c)) <= params.inlier_band) {
            fit.inliers.push_back(cloud[i]);
        }
    }
    return fit;
}

/// Top iff the normal is within `threshold_deg` of (anti)parallel to gravity.
inline GraspType classify_grasp(const Vec3& normal, const Vec3& gravity, double threshold_deg = 25.0)
{
    const double c = std::clamp(std::abs(normal.normalized().dot(gravity.normalized())), 0.0, 1.0);
    const double angle = std::acos(c) * 180.0 / std::numbers::pi;
    return angle <= threshold_deg ? GraspType::Top : GraspType::Side;
}

// ---------------------------------------------------------------------------
// Side grasp

struct SideGrasp {
    double width = 0.0;
    Vec3 center;
    Vec3 jaw_axis;
};

/// Jaws closing along plane-normal x gravity (horizontal, within the face); the
/// grasp point moves to the midpoint of the two extreme inliers along that axis.
inline SideGrasp side_grasp_params(const std::vector<Vec3>& inliers, const Vec3& normal, const Vec3& gravity)
{
    if (inliers.size() < 2) throw GraspError("side grasp needs at least two plane points");
    const Vec3 axis = normal.cross(gravity);
    if (axis.norm() < 1e-9) throw GraspError("side grasp: surface normal parallel to gravity");
    SideGrasp g;
    g.jaw_axis = axis.normalized();
    std::size_t lo = 0, hi = 0;
    double lo_v = inliers[0].dot(g.jaw_axis), hi_v = lo_v;
    for (std::size_t i = 1; i < inliers.size(); ++i) {
        const double v = inliers[i].dot(g.jaw_axis);
        if (v < lo_v) {
            lo_v = v;
            lo = i;
        }
        if (v > hi_v) {
            hi_v = v;
            hi = i;
        }
    }
    g.width = hi_v - lo_v;
    if (!(g.width > 0.0)) throw GraspError("side grasp: plane points collinear with gravity");
    g.center = 0.5 * (inliers[lo] + inliers[hi]);
    return g;
}

// ---------------------------------------------------------------------------
// Top grasp: minimal extent of the projected plane points

/// Orthonormal (u, v) spanning the plane perpendicular to gravity, with (u, v, -gravity) right-handed.
inline std::pair<Vec3, Vec3> horizontal_basis(const Vec3& gravity)
{
    const Vec3 up = -gravity.normalized();
    Vec3 seed = std::abs(up.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    Vec3 u = (seed - seed.dot(up) * up).normalized();
    Vec3 v = up.cross(u);
    return {u, v};
}

/// Andrew's monotone chain; counter-clockwise, no collinear vertices.
inline std::vector<Vec2> convex_hull(std::vector<Vec2> pts)
{
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    auto cross = [](const Vec2& o, const Vec2& a, const Vec2& b) {
        return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
    };
    std::vector<Vec2> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

struct MinimalExtent {
    /// Direction of minimal extent in [0, pi), measured from the first basis axis.
    double angle = 0.0;
    double width = 0.0;
    /// Centre of the bounding strip, midway along both the extent and the edge direction.
    Vec2 center = Vec2::Zero();
    /// Hull had no area; the extent is taken along the point set instead.
    bool degenerate = false;
};

namespace detail {

inline double fold_angle(double a)
{
    constexpr double pi = std::numbers::pi;
    a = std::fmod(a, pi);
    if (a < 0) a += pi;
    if (a > pi - 1e-9) a = 0.0;
    return a;
}

} // namespace detail

/// Rotating calipers over a counter-clockwise convex hull. The minimal width of a
/// convex polygon is attained with one hull edge flush against a caliper, so each
/// edge is paired with its farthest (antipodal) vertex, advanced monotonically.
/// Equal widths resolve to the smaller angle.
inline MinimalExtent minimal_extent(const std::vector<Vec2>& hull)
{
    MinimalExtent best;
    const std::size_t n = hull.size();
    if (n == 0) return best;
    auto span_along = [&](const Vec2& dir, double& lo, double& hi) {
        lo = hi = hull[0].dot(dir);
        for (const auto& p : hull) {
            lo = std::min(lo, p.dot(dir));
            hi = std::max(hi, p.dot(dir));
        }
    };
    if (n < 3) {
        best.degenerate = true;
        if (n == 1) {
            best.center = hull[0];
            return best;
        }
        const Vec2 d = (hull[1] - hull[0]).normalized();
        best.angle = detail::fold_angle(std::atan2(d.y(), d.x()));
        best.width = (hull[1] - hull[0]).norm();
        best.center = 0.5 * (hull[0] + hull[1]);
        return best;
    }

    auto area2 = [&](std::size_t i, std::size_t j, std::size_t k) {
        const Vec2 a = hull[j] - hull[i];
        const Vec2 b = hull[k] - hull[i];
        return a.x() * b.y() - a.y() * b.x();
    };
    double best_width = std::numeric_limits<double>::infinity();
    double best_angle = 0.0;
    std::size_t j = 1;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t i2 = (i + 1) % n;
        while (area2(i, i2, (j + 1) % n) > area2(i, i2, j)) j = (j + 1) % n;
        const Vec2 e = hull[i2] - hull[i];
        const double len = e.norm();
        const double width = area2(i, i2, j) / len;
        const Vec2 normal(-e.y() / len, e.x() / len);
        const double angle = detail::fold_angle(std::atan2(normal.y(), normal.x()));
        const bool first = i == 0;
        const double tol = first ? 0.0 : 1e-12 * std::max(1.0, best_width);
        if (first || width < best_width - tol || (std::abs(width - best_width) <= tol && angle < best_angle)) {
            best_width = width;
            best_angle = angle;
        }
    }
    best.width = best_width;
    best.angle = best_angle;
    const Vec2 dir(std::cos(best_angle), std::sin(best_angle));
    const Vec2 along(-dir.y(), dir.x());
    double nlo, nhi, tlo, thi;
    span_along(dir, nlo, nhi);
    span_along(along, tlo, thi);
    best.center = 0.5 * (nlo + nhi) * dir + 0.5 * (tlo + thi) * along;
    return best;
}

struct TopGrasp {
    double turn_angle = 0.0;
    double width = 0.0;
    Vec3 center;
    Vec3 jaw_axis;
    bool degenerate = false;
};

inline TopGrasp top_grasp_params(const std::vector<Vec3>& inliers, const Vec3& gravity)
{
    if (inliers.empty()) throw GraspError("top grasp needs plane points");
    const auto [u, v] = horizontal_basis(gravity);
    const Vec3 g = gravity.normalized();
    std::vector<Vec2> flat;
    flat.reserve(inliers.size());
    double height = 0.0;
    for (const auto& p : inliers) {
        flat.emplace_back(p.dot(u), p.dot(v));
        height += p.dot(g);
    }
    height /= static_cast<double>(inliers.size());

    std::vector<Vec2> hull = convex_hull(flat);
    // Zero-area hulls (all points on a line) reduce to their two extremes.
    if (hull.size() >= 3) {
        double area = 0.0;
        for (std::size_t i = 0; i < hull.size(); ++i) {
            const Vec2& a = hull[i];
            const Vec2& b = hull[(i + 1) % hull.size()];
            area += a.x() * b.y() - a.y() * b.x();
        }
        if (std::abs(area) < 1e-18) {
            std::sort(hull.begin(), hull.end(), [](const Vec2& a, const Vec2& b) {
                return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
            });
            hull = {hull.front(), hull.back()};
        }
    }
    const MinimalExtent ext = minimal_extent(hull);
    TopGrasp t;
    t.turn_angle = ext.angle;
    t.width = ext.width;
    t.degenerate = ext.degenerate;
    t.center = ext.center.x() * u + ext.center.y() * v + height * g;
    t.jaw_axis = std::cos(ext.angle) * u + std::sin(ext.angle) * v;
    return t;
}

/// Distance from the grasp point down to the segment's lowest point along gravity.
inline double place_height(const BinaryMask& mask, const OrderedPointCloud& cloud, const Vec3& grasp_point,
                           const Vec3& gravity)
{
    if (!cloud.matches(mask)) throw std::invalid_argument("place_height: mask and cloud dimensions differ");
    const Vec3 g = gravity.normalized();
    double h = 0.0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (mask[i] && cloud.valid(i)) h = std::max(h, (cloud[i] - grasp_point).dot(g));
    }
    return h;
}

struct GraspSpec {
    GraspType type = GraspType::Top;
    Vec3 grasp_point;
    Vec3 approach_dir;
    Vec3 normal;
    Vec3 jaw_axis;
    /// Jaw direction angle in the horizontal plane, [0, pi).
    double turn_angle = 0.0;
    double object_width = 0.0;
    double place_height = 0.0;
    double approach_length = 0.12;
    std::size_t plane_points = 0;
};

inline GraspSpec build_grasp_spec(const GraspRequest& request, const OrderedPointCloud& cloud,
                                  const Vec3& gravity = default_gravity(), const GraspParams& params = {})
{
    if (!cloud.matches(request.mask)) {
        throw std::invalid_argument("grasp: point cloud and mask dimensions differ");
    }
    const OrderedPointCloud filtered = filter_cloud(cloud, request.mask, params);
    const PlaneFit fit = surface_normal(filtered, request.mask, request.point, params);

    GraspSpec spec;
    spec.normal = fit.normal;
    spec.type = classify_grasp(fit.normal, gravity, params.top_threshold_deg);
    spec.plane_points = fit.inliers.size();
    if (spec.type == GraspType::Top) {
        const TopGrasp t = top_grasp_params(fit.inliers, gravity);
        spec.grasp_point = t.center;
        spec.object_width = t.width;
        spec.turn_angle = t.turn_angle;
        spec.jaw_axis = t.jaw_axis;
    } else {
        const SideGrasp s = side_grasp_params(fit.inliers, fit.normal, gravity);
        spec.grasp_point = s.center;
        spec.object_width = s.width;
        spec.jaw_axis = s.jaw_axis;
        const auto [u, v] = horizontal_basis(gravity);
        spec.turn_angle = detail::fold_angle(std::atan2(s.jaw_axis.dot(v), s.jaw_axis.dot(u)));
    }
    spec.approach_dir = -fit.normal;
    spec.approach_length = params.approach_length;
    spec.place_height = place_height(request.mask, filtered, spec.grasp_point, gravity);
    return spec;
}

/// One "key: value" line per field.
inline std::string format_grasp_spec(const GraspSpec& s)
{
    std::ostringstream os;
    os.precision(6);
    os << std::fixed;
    auto vec = [&](const Vec3& v) { os << v.x() << ' ' << v.y() << ' ' << v.z(); };
    os << "type: " << grasp_type_name(s.type) << '\n';
    os << "grasp_point: ";
    vec(s.grasp_point);
    os << "\napproach_dir: ";
    vec(s.approach_dir);
    os << "\nnormal: ";
    vec(s.normal);
    os << "\njaw_axis: ";
    vec(s.jaw_axis);
    os << "\nturn_angle_deg: " << s.turn_angle * 180.0 / std::numbers::pi << '\n';
    os << "object_width: " << s.object_width << '\n';
    os << "place_height: " << s.place_height << '\n';
    os << "approach_length: " << s.approach_length << '\n';
    os << "plane_points: " << s.plane_points << '\n';
    return os.str();
}

} // namespace pats
