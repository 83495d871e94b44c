#include "promptseg/hsv.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace promptseg {

Hsv rgb_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b)
{
    double const rf = r / 255.0;
    double const gf = g / 255.0;
    double const bf = b / 255.0;
    double const max = std::max({rf, gf, bf});
    double const min = std::min({rf, gf, bf});
    double const delta = max - min;

    Hsv out;
    out.v = max;
    out.s = max > 0.0 ? delta / max : 0.0;
    if (delta > 0.0) {
        double h = 0.0;
        if (max == rf) {
            h = 60.0 * ((gf - bf) / delta);
        } else if (max == gf) {
            h = 60.0 * ((bf - rf) / delta + 2.0);
        } else {
            h = 60.0 * ((rf - gf) / delta + 4.0);
        }
        if (h < 0.0) {
            h += 360.0;
        }
        out.h = h >= 360.0 ? h - 360.0 : h;
    }
    return out;
}

void HsvThresholds::validate() const
{
    auto check = [](Range const& r, double lo, double hi, char const* name) {
        if (!(r.lo <= r.hi) || r.lo < lo || r.hi > hi) {
            throw std::invalid_argument(fmt::format("invalid {} range [{}, {}]; must satisfy {} <= lo <= hi <= {}",
                                                    name, r.lo, r.hi, lo, hi));
        }
    };
    if (hue.empty()) {
        throw std::invalid_argument("at least one hue range is required");
    }
    for (auto const& r : hue) {
        check(r, 0.0, 360.0, "hue");
    }
    check(saturation, 0.0, 1.0, "saturation");
    check(value, 0.0, 1.0, "value");
}

bool is_fire_colored(Rgb pixel, HsvThresholds const& th)
{
    auto const hsv = rgb_to_hsv(pixel);
    if (!th.saturation.contains(hsv.s) || !th.value.contains(hsv.v)) {
        return false;
    }
    return std::any_of(th.hue.begin(), th.hue.end(), [&](Range const& r) { return r.contains(hsv.h); });
}

namespace {

double parse_number(std::string_view s, std::string const& whole)
{
    double v = 0.0;
    auto const [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size() || s.empty()) {
        throw std::invalid_argument(fmt::format("malformed range list '{}'", whole));
    }
    return v;
}

} // namespace

std::vector<Range> parse_ranges(std::string const& text)
{
    std::vector<Range> out;
    std::string_view rest = text;
    while (!rest.empty()) {
        auto const comma = rest.find(',');
        auto const item = rest.substr(0, comma);
        // Skip a leading sign position so "-" is only taken as a separator.
        auto const dash = item.find('-', 1);
        if (dash == std::string_view::npos) {
            throw std::invalid_argument(fmt::format("malformed range list '{}': expected lo-hi", text));
        }
        out.push_back({parse_number(item.substr(0, dash), text), parse_number(item.substr(dash + 1), text)});
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
    if (out.empty()) {
        throw std::invalid_argument("empty range list");
    }
    return out;
}

std::string format_ranges(std::vector<Range> const& ranges)
{
    std::string out;
    for (auto const& r : ranges) {
        if (!out.empty()) {
            out += ',';
        }
        out += fmt::format("{}-{}", r.lo, r.hi);
    }
    return out;
}

} // namespace promptseg
