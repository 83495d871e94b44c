#pragma once

#include "promptseg/mask.hpp"

#include <string>
#include <string_view>

namespace promptseg {

/// Row-major run lengths as space-separated decimals, alternating
/// background/fire and always starting with a (possibly empty) background
/// run: [0,1,1,0] -> "1 2 1", all fire 2x2 -> "0 4".
std::string encode_mask(BinaryMask const& mask);

/// Inverse of encode_mask. Throws std::invalid_argument on malformed text or
/// when the runs do not sum to width * height.
BinaryMask decode_mask(std::string_view rle, int width, int height);

} // namespace promptseg
