#pragma once

#include <compare>

namespace promptseg {

/// Half-open pixel rectangle [x0, x1) x [y0, y1) with a detector confidence.
struct BoundingBox {
    int x0 = 0;
    int y0 = 0;
    int x1 = 0;
    int y1 = 0;
    double confidence = 1.0;

    int width() const { return x1 - x0; }
    int height() const { return y1 - y0; }
    long area() const { return static_cast<long>(width()) * height(); }
    bool contains(int x, int y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }

    /// 0 <= x0 < x1 <= width and 0 <= y0 < y1 <= height.
    bool valid_for(int image_width, int image_height) const
    {
        return x0 >= 0 && y0 >= 0 && x0 < x1 && y0 < y1 && x1 <= image_width && y1 <= image_height;
    }

    friend bool operator==(BoundingBox const&, BoundingBox const&) = default;
};

enum class Polarity { negative = 0, positive = 1 };

struct PointPrompt {
    int x = 0;
    int y = 0;
    Polarity polarity = Polarity::positive;

    bool positive() const { return polarity == Polarity::positive; }

    friend bool operator==(PointPrompt const&, PointPrompt const&) = default;
};

/// Throws std::invalid_argument if the box does not fit the image.
void require_valid_box(BoundingBox const& box, int image_width, int image_height);

} // namespace promptseg
