#pragma once

// PNG/JPEG codec glue (OpenCV imgcodecs). Link opencv_imgcodecs when including this.

#include <pats/image.hpp>
#include <pats/partition_tree.hpp>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pats {

class ImageDecodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline ColorImage from_bgr(const cv::Mat& bgr)
{
    if (bgr.empty()) throw ImageDecodeError("image could not be decoded");
    if (bgr.cols < 2 || bgr.rows < 2) throw ImageDecodeError("image must be at least 2x2");
    ColorImage img(bgr.cols, bgr.rows);
    for (int y = 0; y < bgr.rows; ++y) {
        const auto* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < bgr.cols; ++x) {
            img(x, y) = {row[x][2], row[x][1], row[x][0]};
        }
    }
    return img;
}

inline cv::Mat to_mat(const GrayImage& g)
{
    cv::Mat m(g.height(), g.width(), CV_8UC1);
    for (int y = 0; y < g.height(); ++y) {
        auto* row = m.ptr<std::uint8_t>(y);
        for (int x = 0; x < g.width(); ++x) row[x] = g(x, y);
    }
    return m;
}

inline cv::Mat to_mat(const Raster<Rgb>& img)
{
    cv::Mat m(img.height(), img.width(), CV_8UC3);
    for (int y = 0; y < img.height(); ++y) {
        auto* row = m.ptr<cv::Vec3b>(y);
        for (int x = 0; x < img.width(); ++x) {
            const Rgb c = img(x, y);
            row[x] = {c.b, c.g, c.r};
        }
    }
    return m;
}

inline GrayImage from_gray(const cv::Mat& m)
{
    if (m.empty()) throw ImageDecodeError("image could not be decoded");
    GrayImage g(m.cols, m.rows);
    for (int y = 0; y < m.rows; ++y) {
        const auto* row = m.ptr<std::uint8_t>(y);
        for (int x = 0; x < m.cols; ++x) g(x, y) = row[x];
    }
    return g;
}

} // namespace detail

/// 8-bit RGB; alpha is dropped, grayscale is expanded.
inline ColorImage load_color_image(const std::string& path)
{
    cv::Mat m = cv::imread(path, cv::IMREAD_COLOR);
    if (m.empty()) throw ImageDecodeError("cannot read image " + path);
    return detail::from_bgr(m);
}

inline ColorImage decode_color_image(std::string_view bytes)
{
    const cv::Mat buf(1, static_cast<int>(bytes.size()), CV_8UC1, const_cast<char*>(bytes.data()));
    return detail::from_bgr(cv::imdecode(buf, cv::IMREAD_COLOR));
}

inline GrayImage load_gray_image(const std::string& path)
{
    cv::Mat m = cv::imread(path, cv::IMREAD_GRAYSCALE);
    if (m.empty()) throw ImageDecodeError("cannot read image " + path);
    return detail::from_gray(m);
}

inline GrayImage decode_gray_image(std::string_view bytes)
{
    const cv::Mat buf(1, static_cast<int>(bytes.size()), CV_8UC1, const_cast<char*>(bytes.data()));
    return detail::from_gray(cv::imdecode(buf, cv::IMREAD_GRAYSCALE));
}

inline std::string encode_png(const GrayImage& g)
{
    std::vector<std::uint8_t> out;
    if (!cv::imencode(".png", detail::to_mat(g), out)) throw std::runtime_error("PNG encoding failed");
    return {out.begin(), out.end()};
}

inline std::string encode_png(const Raster<Rgb>& img)
{
    std::vector<std::uint8_t> out;
    if (!cv::imencode(".png", detail::to_mat(img), out)) throw std::runtime_error("PNG encoding failed");
    return {out.begin(), out.end()};
}

inline void save_png(const std::string& path, const GrayImage& g)
{
    if (!cv::imwrite(path, detail::to_mat(g))) throw std::runtime_error("cannot write " + path);
}

inline void save_png(const std::string& path, const Raster<Rgb>& img)
{
    if (!cv::imwrite(path, detail::to_mat(img))) throw std::runtime_error("cannot write " + path);
}

/// Binary mask as 0/255.
inline GrayImage mask_to_gray(const BinaryMask& m)
{
    GrayImage g(m.width(), m.height(), 0);
    for (std::size_t i = 0; i < m.size(); ++i) g[i] = m[i] ? 255 : 0;
    return g;
}

/// Random colour per region, fixed seed.
inline Raster<Rgb> colorize_labels(const LabelMap& labels)
{
    std::mt19937 rng(0x5eed);
    std::uniform_int_distribution<int> channel(40, 255);
    std::vector<Rgb> palette(labels.region_count);
    for (auto& c : palette) {
        c = {static_cast<std::uint8_t>(channel(rng)), static_cast<std::uint8_t>(channel(rng)),
             static_cast<std::uint8_t>(channel(rng))};
    }
    Raster<Rgb> out(labels.width(), labels.height());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = palette[labels.labels[i]];
    return out;
}

} // namespace pats
