#include "promptseg/image_io.hpp"

#include "promptseg/error.hpp"

#include <fmt/format.h>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <cstring>

namespace promptseg {

namespace {

cv::Mat decode(std::filesystem::path const& path, int flags)
{
    cv::Mat m = cv::imread(path.string(), flags);
    if (m.empty()) {
        throw Error(fmt::format("cannot read image '{}'", path.string()));
    }
    if (m.depth() != CV_8U) {
        throw Error(fmt::format("image '{}' is not 8-bit", path.string()));
    }
    return m;
}

void encode(std::filesystem::path const& path, cv::Mat const& m)
{
    bool ok = false;
    try {
        ok = cv::imwrite(path.string(), m);
    } catch (cv::Exception const& e) {
        throw Error(fmt::format("cannot write image '{}': {}", path.string(), e.what()));
    }
    if (!ok) {
        throw Error(fmt::format("cannot write image '{}'", path.string()));
    }
}

} // namespace

RgbImage read_rgb(std::filesystem::path const& path)
{
    cv::Mat const bgr = decode(path, cv::IMREAD_COLOR);
    RgbImage out(bgr.cols, bgr.rows);
    for (int y = 0; y < bgr.rows; ++y) {
        auto const* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < bgr.cols; ++x) {
            out.set(x, y, {row[x][2], row[x][1], row[x][0]});
        }
    }
    return out;
}

GrayImage read_gray(std::filesystem::path const& path)
{
    cv::Mat const gray = decode(path, cv::IMREAD_GRAYSCALE);
    std::vector<std::uint8_t> values(static_cast<std::size_t>(gray.cols) * gray.rows);
    for (int y = 0; y < gray.rows; ++y) {
        std::memcpy(values.data() + static_cast<std::size_t>(y) * gray.cols, gray.ptr<std::uint8_t>(y),
                    static_cast<std::size_t>(gray.cols));
    }
    return GrayImage(gray.cols, gray.rows, std::move(values));
}

BinaryMask read_mask(std::filesystem::path const& path)
{
    return binarize(read_gray(path));
}

void write_png(std::filesystem::path const& path, GrayImage const& image)
{
    cv::Mat m(image.height(), image.width(), CV_8UC1);
    std::memcpy(m.data, image.values().data(), image.values().size());
    encode(path, m);
}

void write_mask_png(std::filesystem::path const& path, BinaryMask const& mask)
{
    write_png(path, to_gray(mask));
}

void write_png(std::filesystem::path const& path, RgbImage const& image)
{
    cv::Mat m(image.height(), image.width(), CV_8UC3);
    for (int y = 0; y < image.height(); ++y) {
        auto* row = m.ptr<cv::Vec3b>(y);
        for (int x = 0; x < image.width(); ++x) {
            auto const c = image.at(x, y);
            row[x] = cv::Vec3b(c.b, c.g, c.r);
        }
    }
    encode(path, m);
}

} // namespace promptseg
