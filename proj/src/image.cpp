#include "promptseg/image.hpp"
#include "promptseg/geometry.hpp"

#include "promptseg/error.hpp"

#include <fmt/format.h>

#include <stdexcept>

namespace promptseg {

DimensionMismatch::DimensionMismatch(std::string const& what_a, int wa, int ha, std::string const& what_b, int wb,
                                     int hb)
    : Error(fmt::format("dimension mismatch: {} is {}x{} but {} is {}x{}", what_a, wa, ha, what_b, wb, hb))
{
}

void require_valid_box(BoundingBox const& box, int image_width, int image_height)
{
    if (!box.valid_for(image_width, image_height)) {
        throw std::invalid_argument(fmt::format("box ({},{},{},{}) is not valid for a {}x{} image", box.x0, box.y0,
                                                box.x1, box.y1, image_width, image_height));
    }
}

RgbImage::RgbImage(int width, int height, Rgb fill) : width_(width), height_(height)
{
    if (width < 0 || height < 0) {
        throw std::invalid_argument("negative image dimensions");
    }
    pixels_.assign(static_cast<std::size_t>(width) * height, fill);
}

GrayImage::GrayImage(int width, int height, std::uint8_t fill) : width_(width), height_(height)
{
    if (width < 0 || height < 0) {
        throw std::invalid_argument("negative image dimensions");
    }
    values_.assign(static_cast<std::size_t>(width) * height, fill);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> values)
    : width_(width), height_(height), values_(std::move(values))
{
    if (width < 0 || height < 0 || values_.size() != static_cast<std::size_t>(width) * height) {
        throw std::invalid_argument("gray image buffer does not match its dimensions");
    }
}

} // namespace promptseg
