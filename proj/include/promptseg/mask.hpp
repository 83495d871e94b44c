#pragma once

#include "promptseg/geometry.hpp"
#include "promptseg/image.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace promptseg {

/// Per-pixel fire/background labelling. Row-major; true = fire.
class BinaryMask {
  public:
    /// All-background mask. Throws std::invalid_argument unless width, height >= 1.
    BinaryMask(int width, int height);
    /// Throws std::invalid_argument when bits.size() != width * height.
    BinaryMask(int width, int height, std::vector<std::uint8_t> bits);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return bits_.size(); }

    bool at(int x, int y) const { return bits_[index(x, y)] != 0; }
    void set(int x, int y, bool fire = true) { bits_[index(x, y)] = fire ? 1 : 0; }

    /// One byte per pixel, 0 or 1.
    std::span<std::uint8_t const> bits() const { return bits_; }

    std::size_t count() const;
    bool same_shape(BinaryMask const& other) const
    {
        return width_ == other.width_ && height_ == other.height_;
    }

    friend bool operator==(BinaryMask const&, BinaryMask const&) = default;

  private:
    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

    int width_;
    int height_;
    std::vector<std::uint8_t> bits_;
};

inline constexpr std::uint8_t default_mask_threshold = 127;

/// pixel > threshold -> fire.
BinaryMask binarize(GrayImage const& gray, std::uint8_t threshold = default_mask_threshold);

/// Fire = 255, background = 0.
GrayImage to_gray(BinaryMask const& mask);

/// Pixel-wise OR. Throws on an empty list or mismatched shapes.
BinaryMask union_masks(std::span<BinaryMask const> masks);

/// Pixel-wise AND.
BinaryMask intersect(BinaryMask const& a, BinaryMask const& b);

/// Keeps only the pixels of `mask` inside the half-open box.
BinaryMask clip_to_box(BinaryMask const& mask, BoundingBox const& box);

/// Filled box raster of the given shape.
BinaryMask box_mask(int width, int height, BoundingBox const& box);

} // namespace promptseg
