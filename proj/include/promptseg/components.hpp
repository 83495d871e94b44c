#pragma once

#include "promptseg/geometry.hpp"
#include "promptseg/mask.hpp"

#include <cstdint>
#include <vector>

namespace promptseg {

struct Component {
    BoundingBox box; ///< tight, half-open
    std::size_t area = 0;
};

/// 4-connected labelling of the fire pixels of a mask. Label 0 is
/// background; component k (0-based in `components`) carries label k + 1.
/// Components are numbered in raster order of their first pixel.
struct ComponentMap {
    int width = 0;
    int height = 0;
    std::vector<std::int32_t> labels;
    std::vector<Component> components;

    std::int32_t label_at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
};

ComponentMap label_components(BinaryMask const& mask);

/// Mask holding the union of the listed labels (1-based).
BinaryMask select_components(ComponentMap const& map, std::vector<std::int32_t> const& labels);

} // namespace promptseg
