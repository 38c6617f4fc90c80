#pragma once

// Ordered point cloud on the image grid and its ".pcraw" file format.
//
// pcraw layout, little-endian:
//   char[4]  "PCRW"
//   u16      version (= 1)
//   u32      width, height
//   width*height x { f32 x, f32 y, f32 z }   row-major, metres, NaN = no depth

#include <pats/image.hpp>
#include <pats/detail/binary_io.hpp>

#include <Eigen/Core>

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace pats {

using Vec3 = Eigen::Vector3d;

inline constexpr std::uint16_t kCloudFormatVersion = 1;

class OrderedPointCloud {
public:
    OrderedPointCloud() = default;
    OrderedPointCloud(int width, int height)
        : width_(width), height_(height),
          points_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), invalid_point())
    {
    }

    static Vec3 invalid_point()
    {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        return {nan, nan, nan};
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return points_.size(); }

    const Vec3& operator[](std::size_t i) const { return points_[i]; }
    Vec3& operator[](std::size_t i) { return points_[i]; }
    const Vec3& at(int x, int y) const { return points_.at(index(x, y)); }
    Vec3& at(int x, int y) { return points_.at(index(x, y)); }
    std::size_t index(int x, int y) const noexcept
    {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    bool valid(std::size_t i) const { return points_[i].allFinite(); }
    void invalidate(std::size_t i) { points_[i] = invalid_point(); }

    template <class T>
    bool matches(const Raster<T>& r) const noexcept
    {
        return r.width() == width_ && r.height() == height_;
    }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<Vec3> points_;
};

inline void write_cloud(std::ostream& os, const OrderedPointCloud& cloud)
{
    os.write("PCRW", 4);
    detail::write_le<std::uint16_t>(os, kCloudFormatVersion);
    detail::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(cloud.width()));
    detail::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(cloud.height()));
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        for (int k = 0; k < 3; ++k) detail::write_le<float>(os, static_cast<float>(cloud[i][k]));
    }
    if (!os) throw std::runtime_error("write_cloud: stream failure");
}

inline OrderedPointCloud read_cloud(std::istream& is)
{
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "PCRW", 4) != 0) {
        throw FormatError("not a pcraw point cloud");
    }
    const auto version = detail::read_le<std::uint16_t>(is);
    if (version != kCloudFormatVersion) {
        throw FormatError("unsupported pcraw version " + std::to_string(version));
    }
    const auto w = detail::read_le<std::uint32_t>(is);
    const auto h = detail::read_le<std::uint32_t>(is);
    if (w == 0 || h == 0 || std::uint64_t(w) * h > (std::uint64_t{1} << 28)) {
        throw FormatError("corrupt pcraw header");
    }
    OrderedPointCloud cloud(static_cast<int>(w), static_cast<int>(h));
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        Vec3 p;
        for (int k = 0; k < 3; ++k) p[k] = detail::read_le<float>(is);
        // Any non-finite coordinate marks the whole point as missing.
        cloud[i] = p.allFinite() ? p : OrderedPointCloud::invalid_point();
    }
    return cloud;
}

inline void save_cloud(const std::string& path, const OrderedPointCloud& cloud)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_cloud(os, cloud);
}

inline OrderedPointCloud load_cloud(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    return read_cloud(is);
}

} // namespace pats
