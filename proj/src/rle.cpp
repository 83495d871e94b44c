#include "promptseg/rle.hpp"

#include <fmt/format.h>

#include <charconv>
#include <iterator>
#include <stdexcept>

namespace promptseg {

std::string encode_mask(BinaryMask const& mask)
{
    std::string out;
    auto const bits = mask.bits();
    std::uint8_t current = 0;
    std::size_t run = 0;
    for (auto b : bits) {
        if (b != current) {
            fmt::format_to(std::back_inserter(out), "{} ", run);
            current = b;
            run = 0;
        }
        ++run;
    }
    fmt::format_to(std::back_inserter(out), "{}", run);
    return out;
}

BinaryMask decode_mask(std::string_view rle, int width, int height)
{
    if (width < 1 || height < 1) {
        throw std::invalid_argument(fmt::format("cannot decode a {}x{} mask", width, height));
    }
    auto const total = static_cast<std::size_t>(width) * height;
    std::vector<std::uint8_t> bits;
    bits.reserve(total);

    std::uint8_t value = 0;
    char const* p = rle.data();
    char const* const end = rle.data() + rle.size();
    bool any = false;
    while (p != end) {
        if (*p == ' ') {
            ++p;
            continue;
        }
        std::size_t run = 0;
        auto const [next, ec] = std::from_chars(p, end, run);
        if (ec != std::errc{} || (next != end && *next != ' ')) {
            throw std::invalid_argument(fmt::format("malformed RLE near offset {}", p - rle.data()));
        }
        if (run > total - bits.size()) {
            throw std::invalid_argument(fmt::format("RLE runs exceed {}x{} = {} pixels", width, height, total));
        }
        bits.insert(bits.end(), run, value);
        value ^= 1;
        p = next;
        any = true;
    }
    if (!any || bits.size() != total) {
        throw std::invalid_argument(
            fmt::format("RLE runs sum to {} but a {}x{} mask has {} pixels", bits.size(), width, height, total));
    }
    return BinaryMask(width, height, std::move(bits));
}

} // namespace promptseg
