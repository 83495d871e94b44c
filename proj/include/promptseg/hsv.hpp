#pragma once

#include "promptseg/image.hpp"

#include <string>
#include <vector>

namespace promptseg {

/// Hexcone HSV: hue in degrees [0, 360), saturation and value in [0, 1].
struct Hsv {
    double h = 0.0;
    double s = 0.0;
    double v = 0.0;
};

Hsv rgb_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b);
inline Hsv rgb_to_hsv(Rgb c) { return rgb_to_hsv(c.r, c.g, c.b); }

/// Closed interval.
struct Range {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double v) const { return v >= lo && v <= hi; }
    friend bool operator==(Range const&, Range const&) = default;
};

/// Fire-colour gate. A pixel passes when its hue falls in any hue range and
/// its saturation and value fall in their ranges. The defaults cover
/// red/orange/yellow and reject dark or grey pixels.
struct HsvThresholds {
    std::vector<Range> hue{{0.0, 65.0}, {340.0, 360.0}};
    Range saturation{0.20, 1.0};
    Range value{0.50, 1.0};

    /// Throws std::invalid_argument for inverted or out-of-domain ranges.
    void validate() const;

    friend bool operator==(HsvThresholds const&, HsvThresholds const&) = default;
};

bool is_fire_colored(Rgb pixel, HsvThresholds const& th);

/// Parses "lo-hi[,lo-hi...]", e.g. "0-65,340-360".
std::vector<Range> parse_ranges(std::string const& text);
std::string format_ranges(std::vector<Range> const& ranges);

} // namespace promptseg
