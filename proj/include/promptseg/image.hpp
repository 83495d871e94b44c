#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace promptseg {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(Rgb const&, Rgb const&) = default;
};

/// 8-bit interleaved RGB raster, row-major.
class RgbImage {
  public:
    RgbImage() = default;
    RgbImage(int width, int height, Rgb fill = {});

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return pixels_.empty(); }

    Rgb at(int x, int y) const { return pixels_[index(x, y)]; }
    void set(int x, int y, Rgb c) { pixels_[index(x, y)] = c; }

    std::span<Rgb const> pixels() const { return pixels_; }
    std::span<Rgb> pixels() { return pixels_; }

    friend bool operator==(RgbImage const&, RgbImage const&) = default;

  private:
    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

    int width_ = 0;
    int height_ = 0;
    std::vector<Rgb> pixels_;
};

/// 8-bit single-channel raster, row-major.
class GrayImage {
  public:
    GrayImage() = default;
    GrayImage(int width, int height, std::uint8_t fill = 0);
    GrayImage(int width, int height, std::vector<std::uint8_t> values);

    int width() const { return width_; }
    int height() const { return height_; }

    std::uint8_t at(int x, int y) const { return values_[static_cast<std::size_t>(y) * width_ + x]; }
    void set(int x, int y, std::uint8_t v) { values_[static_cast<std::size_t>(y) * width_ + x] = v; }

    std::span<std::uint8_t const> values() const { return values_; }

  private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> values_;
};

} // namespace promptseg
