#include "promptseg/overlay.hpp"

#include "promptseg/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace promptseg {

RgbImage render_overlay(RgbImage const& image, BinaryMask const& mask, Rgb color, double alpha)
{
    if (image.width() != mask.width() || image.height() != mask.height()) {
        throw DimensionMismatch("image", image.width(), image.height(), "mask", mask.width(), mask.height());
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument(fmt::format("overlay alpha {} outside [0, 1]", alpha));
    }
    auto blend = [alpha](std::uint8_t base, std::uint8_t tint) {
        // The epsilon keeps exact products such as 0.3 * 255 from flooring one short.
        double const v = (1.0 - alpha) * base + alpha * tint;
        return static_cast<std::uint8_t>(std::floor(v + 1e-9));
    };
    RgbImage out = image;
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            if (!mask.at(x, y)) {
                continue;
            }
            auto const p = image.at(x, y);
            out.set(x, y, {blend(p.r, color.r), blend(p.g, color.g), blend(p.b, color.b)});
        }
    }
    return out;
}

Rgb parse_color(std::string const& text)
{
    if (text == "green") {
        return overlay_green;
    }
    if (text == "red") {
        return overlay_red;
    }
    if (text == "blue") {
        return {0, 0, 255};
    }
    if (text == "yellow") {
        return {255, 255, 0};
    }
    if (text == "orange") {
        return {255, 165, 0};
    }
    std::istringstream in(text);
    int r = -1;
    int g = -1;
    int b = -1;
    char c1 = 0;
    char c2 = 0;
    if ((in >> r >> c1 >> g >> c2 >> b) && c1 == ',' && c2 == ',' && in.peek() == EOF && r >= 0 && r <= 255 &&
        g >= 0 && g <= 255 && b >= 0 && b <= 255) {
        return {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(b)};
    }
    throw std::invalid_argument(fmt::format("unknown colour '{}' (use a name or R,G,B)", text));
}

} // namespace promptseg
