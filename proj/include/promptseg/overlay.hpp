#pragma once

#include "promptseg/image.hpp"
#include "promptseg/mask.hpp"

#include <string>

namespace promptseg {

inline constexpr Rgb overlay_green{0, 255, 0};
inline constexpr Rgb overlay_red{255, 0, 0};

/// Fire pixels become floor((1 - alpha) * pixel + alpha * color); the rest
/// are copied. Throws DimensionMismatch or std::invalid_argument for alpha
/// outside [0, 1].
RgbImage render_overlay(RgbImage const& image, BinaryMask const& mask, Rgb color = overlay_green, double alpha = 0.5);

/// "green", "red", "blue", "yellow", "orange" or "R,G,B".
Rgb parse_color(std::string const& text);

} // namespace promptseg
