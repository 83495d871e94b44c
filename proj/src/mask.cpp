#include "promptseg/mask.hpp"

#include "promptseg/error.hpp"

#include <algorithm>
#include <stdexcept>

namespace promptseg {

BinaryMask::BinaryMask(int width, int height) : BinaryMask(width, height, {})
{
}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits))
{
    if (width < 1 || height < 1) {
        throw std::invalid_argument("mask dimensions must be at least 1x1");
    }
    auto const n = static_cast<std::size_t>(width) * height;
    if (bits_.empty()) {
        bits_.assign(n, 0);
    }
    if (bits_.size() != n) {
        throw std::invalid_argument("mask bit count does not equal width * height");
    }
    for (auto& b : bits_) {
        b = b ? 1 : 0;
    }
}

std::size_t BinaryMask::count() const
{
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

BinaryMask binarize(GrayImage const& gray, std::uint8_t threshold)
{
    std::vector<std::uint8_t> bits(gray.values().size());
    std::transform(gray.values().begin(), gray.values().end(), bits.begin(),
                   [threshold](std::uint8_t v) { return v > threshold ? 1 : 0; });
    return BinaryMask(gray.width(), gray.height(), std::move(bits));
}

GrayImage to_gray(BinaryMask const& mask)
{
    std::vector<std::uint8_t> values(mask.size());
    std::transform(mask.bits().begin(), mask.bits().end(), values.begin(),
                   [](std::uint8_t b) -> std::uint8_t { return b ? 255 : 0; });
    return GrayImage(mask.width(), mask.height(), std::move(values));
}

BinaryMask union_masks(std::span<BinaryMask const> masks)
{
    if (masks.empty()) {
        throw std::invalid_argument("union_masks needs at least one mask");
    }
    std::vector<std::uint8_t> bits(masks.front().bits().begin(), masks.front().bits().end());
    for (auto const& m : masks.subspan(1)) {
        if (!m.same_shape(masks.front())) {
            throw DimensionMismatch("first mask", masks.front().width(), masks.front().height(), "mask", m.width(),
                                    m.height());
        }
        auto const src = m.bits();
        for (std::size_t i = 0; i < bits.size(); ++i) {
            bits[i] |= src[i];
        }
    }
    return BinaryMask(masks.front().width(), masks.front().height(), std::move(bits));
}

BinaryMask intersect(BinaryMask const& a, BinaryMask const& b)
{
    if (!a.same_shape(b)) {
        throw DimensionMismatch("left mask", a.width(), a.height(), "right mask", b.width(), b.height());
    }
    std::vector<std::uint8_t> bits(a.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        bits[i] = a.bits()[i] & b.bits()[i];
    }
    return BinaryMask(a.width(), a.height(), std::move(bits));
}

BinaryMask clip_to_box(BinaryMask const& mask, BoundingBox const& box)
{
    BinaryMask out(mask.width(), mask.height());
    int const x0 = std::max(box.x0, 0);
    int const y0 = std::max(box.y0, 0);
    int const x1 = std::min(box.x1, mask.width());
    int const y1 = std::min(box.y1, mask.height());
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            if (mask.at(x, y)) {
                out.set(x, y);
            }
        }
    }
    return out;
}

BinaryMask box_mask(int width, int height, BoundingBox const& box)
{
    BinaryMask out(width, height);
    for (int y = std::max(box.y0, 0); y < std::min(box.y1, height); ++y) {
        for (int x = std::max(box.x0, 0); x < std::min(box.x1, width); ++x) {
            out.set(x, y);
        }
    }
    return out;
}

} // namespace promptseg
