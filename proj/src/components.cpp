#include "promptseg/components.hpp"

#include <algorithm>

namespace promptseg {

ComponentMap label_components(BinaryMask const& mask)
{
    ComponentMap map;
    map.width = mask.width();
    map.height = mask.height();
    map.labels.assign(mask.size(), 0);

    std::vector<std::pair<int, int>> stack;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            auto const seed = static_cast<std::size_t>(y) * map.width + x;
            if (!mask.at(x, y) || map.labels[seed] != 0) {
                continue;
            }
            auto const label = static_cast<std::int32_t>(map.components.size() + 1);
            Component comp;
            comp.box = {x, y, x + 1, y + 1, 1.0};
            map.labels[seed] = label;
            stack.emplace_back(x, y);
            while (!stack.empty()) {
                auto const [cx, cy] = stack.back();
                stack.pop_back();
                ++comp.area;
                comp.box.x0 = std::min(comp.box.x0, cx);
                comp.box.y0 = std::min(comp.box.y0, cy);
                comp.box.x1 = std::max(comp.box.x1, cx + 1);
                comp.box.y1 = std::max(comp.box.y1, cy + 1);
                constexpr int dx[4] = {1, -1, 0, 0};
                constexpr int dy[4] = {0, 0, 1, -1};
                for (int k = 0; k < 4; ++k) {
                    int const nx = cx + dx[k];
                    int const ny = cy + dy[k];
                    if (nx < 0 || ny < 0 || nx >= map.width || ny >= map.height) {
                        continue;
                    }
                    auto const idx = static_cast<std::size_t>(ny) * map.width + nx;
                    if (mask.at(nx, ny) && map.labels[idx] == 0) {
                        map.labels[idx] = label;
                        stack.emplace_back(nx, ny);
                    }
                }
            }
            map.components.push_back(comp);
        }
    }
    return map;
}

BinaryMask select_components(ComponentMap const& map, std::vector<std::int32_t> const& labels)
{
    std::vector<std::uint8_t> keep(map.components.size() + 1, 0);
    for (auto l : labels) {
        if (l > 0 && static_cast<std::size_t>(l) < keep.size()) {
            keep[l] = 1;
        }
    }
    std::vector<std::uint8_t> bits(map.labels.size());
    std::transform(map.labels.begin(), map.labels.end(), bits.begin(),
                   [&keep](std::int32_t l) { return keep[l]; });
    return BinaryMask(map.width, map.height, std::move(bits));
}

} // namespace promptseg
