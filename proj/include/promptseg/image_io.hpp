#pragma once

#include "promptseg/image.hpp"
#include "promptseg/mask.hpp"

#include <filesystem>

namespace promptseg {

/// PNG/JPEG (8-bit) to RGB. Throws Error when the file cannot be decoded.
RgbImage read_rgb(std::filesystem::path const& path);
GrayImage read_gray(std::filesystem::path const& path);

/// Grayscale read followed by binarize() at the default threshold.
BinaryMask read_mask(std::filesystem::path const& path);

/// Writes fire = 255, background = 0.
void write_mask_png(std::filesystem::path const& path, BinaryMask const& mask);
void write_png(std::filesystem::path const& path, RgbImage const& image);
void write_png(std::filesystem::path const& path, GrayImage const& image);

} // namespace promptseg
