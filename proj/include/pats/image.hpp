#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pats {

struct Pixel {
    int x = 0;
    int y = 0;

    friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// Dense row-major 2D grid.
template <class T>
class Raster {
public:
    using value_type = T;

    Raster() = default;
    Raster(int width, int height, const T& fill = T{})
        : width_(width), height_(height)
    {
        if (width < 0 || height < 0) {
            throw std::invalid_argument("Raster: negative dimensions");
        }
        data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
    }
    Raster(int width, int height, std::vector<T> data)
        : width_(width), height_(height), data_(std::move(data))
    {
        if (width < 0 || height < 0 ||
            data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
            throw std::invalid_argument("Raster: buffer length does not match dimensions");
        }
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }

    bool contains(Pixel p) const noexcept
    {
        return p.x >= 0 && p.y >= 0 && p.x < width_ && p.y < height_;
    }
    std::size_t index(int x, int y) const noexcept
    {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    T& operator()(int x, int y) noexcept { return data_[index(x, y)]; }
    const T& operator()(int x, int y) const noexcept { return data_[index(x, y)]; }
    T& operator[](std::size_t i) noexcept { return data_[i]; }
    const T& operator[](std::size_t i) const noexcept { return data_[i]; }

    const T& at(Pixel p) const
    {
        if (!contains(p)) {
            throw std::out_of_range("pixel (" + std::to_string(p.x) + "," + std::to_string(p.y) +
                                    ") outside " + std::to_string(width_) + "x" + std::to_string(height_));
        }
        return data_[index(p.x, p.y)];
    }

    std::span<T> pixels() noexcept { return data_; }
    std::span<const T> pixels() const noexcept { return data_; }
    std::vector<T>& storage() noexcept { return data_; }
    const std::vector<T>& storage() const noexcept { return data_; }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

template <class A, class B>
bool same_shape(const Raster<A>& a, const Raster<B>& b) noexcept
{
    return a.width() == b.width() && a.height() == b.height();
}

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// CIELab triple (L in [0,100]).
struct Lab {
    float l = 0.f;
    float a = 0.f;
    float b = 0.f;
};

/// 8-bit RGB input image; at least 2x2.
class ColorImage : public Raster<Rgb> {
public:
    ColorImage() = default;
    ColorImage(int width, int height, Rgb fill = {}) : Raster<Rgb>(check(width, height), height, fill) {}
    ColorImage(int width, int height, std::vector<Rgb> data)
        : Raster<Rgb>(check(width, height), height, std::move(data))
    {
    }

private:
    static int check(int width, int height)
    {
        if (width < 2 || height < 2) {
            throw std::invalid_argument("ColorImage must be at least 2x2");
        }
        return width;
    }
};

using LabImage = Raster<Lab>;
using GradientMap = Raster<float>;
using GrayImage = Raster<std::uint8_t>;
/// 0 = background, 1 = foreground.
using BinaryMask = Raster<std::uint8_t>;

/// Atomic partition: dense region ids 0..region_count-1, every region 4-connected.
struct LabelMap {
    Raster<std::uint32_t> labels;
    std::uint32_t region_count = 0;

    int width() const noexcept { return labels.width(); }
    int height() const noexcept { return labels.height(); }
};

inline std::size_t count_foreground(const BinaryMask& m)
{
    std::size_t n = 0;
    for (auto v : m.pixels()) {
        n += v != 0;
    }
    return n;
}

} // namespace pats
