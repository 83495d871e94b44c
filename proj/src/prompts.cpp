#include "promptseg/prompts.hpp"

#include "json_codec.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace promptseg {

namespace {

constexpr int negative_grid = 16;

struct StrategyLabel {
    Strategy strategy;
    std::string_view label;
};

constexpr std::array<StrategyLabel, 7> labels = {{
    {Strategy::automatic, "auto"},
    {Strategy::sp, "sp"},
    {Strategy::sp_sn, "sp+sn"},
    {Strategy::mp, "mp"},
    {Strategy::box, "box"},
    {Strategy::box_sp, "box+sp"},
    {Strategy::box_mp, "box+mp"},
}};

// Squared distance from a pixel to the nearest pixel of a box; 0 inside.
long squared_distance(BoundingBox const& box, int x, int y)
{
    long const dx = std::max({box.x0 - x, 0, x - (box.x1 - 1)});
    long const dy = std::max({box.y0 - y, 0, y - (box.y1 - 1)});
    return dx * dx + dy * dy;
}

} // namespace

std::string_view strategy_name(Strategy s)
{
    for (auto const& l : labels) {
        if (l.strategy == s) {
            return l.label;
        }
    }
    throw std::invalid_argument("unknown strategy value");
}

Strategy parse_strategy(std::string_view name)
{
    std::string normalized(name);
    std::replace(normalized.begin(), normalized.end(), '_', '+');
    std::transform(normalized.begin(), normalized.end(), normalized.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (auto const& l : labels) {
        if (l.label == normalized) {
            return l.strategy;
        }
    }
    throw std::invalid_argument(
        fmt::format("unknown strategy '{}' (expected one of auto, sp, sp+sn, mp, box, box+sp, box+mp)", name));
}

bool uses_box(Strategy s)
{
    return s == Strategy::box || s == Strategy::box_sp || s == Strategy::box_mp;
}

PointPrompt centroid_point(BoundingBox const& box)
{
    return {(box.x0 + box.x1) / 2, (box.y0 + box.y1) / 2, Polarity::positive};
}

std::array<PointPrompt, 9> grid_candidates(BoundingBox const& box)
{
    std::array<PointPrompt, 9> out;
    std::size_t k = 0;
    for (int fy = 1; fy <= 3; ++fy) {
        for (int fx = 1; fx <= 3; ++fx) {
            // floor(x0 + f * w) for f in {1/4, 1/2, 3/4}, exactly in integers.
            out[k++] = {box.x0 + fx * box.width() / 4, box.y0 + fy * box.height() / 4, Polarity::positive};
        }
    }
    return out;
}

std::vector<PointPrompt> grid_points(BoundingBox const& box, RgbImage const& image, HsvThresholds const& th)
{
    require_valid_box(box, image.width(), image.height());
    std::vector<PointPrompt> out;
    for (auto const& p : grid_candidates(box)) {
        if (is_fire_colored(image.at(p.x, p.y), th)) {
            out.push_back(p);
        }
    }
    if (out.empty()) {
        out.push_back(centroid_point(box));
    }
    return out;
}

std::optional<PointPrompt> negative_point(std::vector<BoundingBox> const& boxes, int width, int height)
{
    if (width < 1 || height < 1) {
        throw std::invalid_argument("negative_point needs positive image dimensions");
    }
    std::optional<PointPrompt> best;
    long best_distance = -1;
    for (int j = 0; j < negative_grid; ++j) {
        int const y = static_cast<int>((2L * j + 1) * height / (2 * negative_grid));
        for (int i = 0; i < negative_grid; ++i) {
            int const x = static_cast<int>((2L * i + 1) * width / (2 * negative_grid));
            long nearest = std::numeric_limits<long>::max();
            for (auto const& b : boxes) {
                nearest = std::min(nearest, squared_distance(b, x, y));
            }
            // Raster order with a strict comparison keeps the smallest (y, x) on ties.
            if (nearest > 0 && nearest > best_distance) {
                best_distance = nearest;
                best = PointPrompt{x, y, Polarity::negative};
            }
        }
    }
    return best;
}

std::vector<PromptSet> build_prompts(Strategy strategy, std::vector<BoundingBox> const& boxes, RgbImage const& image,
                                     HsvThresholds const& th)
{
    if (strategy == Strategy::automatic) {
        return {PromptSet::automatic()};
    }
    for (auto const& b : boxes) {
        require_valid_box(b, image.width(), image.height());
    }

    std::optional<PointPrompt> shared_negative;
    if (strategy == Strategy::sp_sn && !boxes.empty()) {
        shared_negative = negative_point(boxes, image.width(), image.height());
    }

    std::vector<PromptSet> out;
    out.reserve(boxes.size());
    for (auto const& b : boxes) {
        PromptSet set;
        switch (strategy) {
        case Strategy::sp:
            set.points = {centroid_point(b)};
            break;
        case Strategy::sp_sn:
            set.points = {centroid_point(b)};
            if (shared_negative) {
                set.points.push_back(*shared_negative);
            }
            break;
        case Strategy::mp:
            set.points = grid_points(b, image, th);
            break;
        case Strategy::box:
            set.box = b;
            break;
        case Strategy::box_sp:
            set.box = b;
            set.points = {centroid_point(b)};
            break;
        case Strategy::box_mp:
            set.box = b;
            set.points = grid_points(b, image, th);
            break;
        case Strategy::automatic:
            break;
        }
        out.push_back(std::move(set));
    }
    return out;
}

std::string serialize(PromptSet const& set)
{
    codec::json j = codec::json::object();
    codec::write_prompt_fields(set, j);
    return j.dump();
}

PromptSet parse_prompt_set(std::string_view line)
{
    try {
        return codec::read_prompt_fields(codec::json::parse(line));
    } catch (codec::json::exception const& e) {
        throw std::invalid_argument(fmt::format("malformed prompt set: {}", e.what()));
    }
}

namespace codec {

json box_to_json(BoundingBox const& box)
{
    return json{{"x0", box.x0}, {"y0", box.y0}, {"x1", box.x1}, {"y1", box.y1}, {"conf", box.confidence}};
}

BoundingBox box_from_json(json const& j)
{
    return {j.at("x0").get<int>(), j.at("y0").get<int>(), j.at("x1").get<int>(), j.at("y1").get<int>(),
            j.value("conf", 1.0)};
}

json point_to_json(PointPrompt const& p)
{
    return json{{"x", p.x}, {"y", p.y}, {"label", p.positive() ? 1 : 0}};
}

PointPrompt point_from_json(json const& j)
{
    int const label = j.at("label").get<int>();
    if (label != 0 && label != 1) {
        throw std::invalid_argument(fmt::format("point label must be 0 or 1, got {}", label));
    }
    return {j.at("x").get<int>(), j.at("y").get<int>(), label == 1 ? Polarity::positive : Polarity::negative};
}

void write_prompt_fields(PromptSet const& set, json& out)
{
    out["mode"] = set.mode == PromptMode::automatic ? "auto" : "prompted";
    if (set.box) {
        out["box"] = box_to_json(*set.box);
    }
    json points = json::array();
    for (auto const& p : set.points) {
        points.push_back(point_to_json(p));
    }
    out["points"] = std::move(points);
}

PromptSet read_prompt_fields(json const& j)
{
    PromptSet set;
    auto const mode = j.at("mode").get<std::string>();
    if (mode == "auto") {
        set.mode = PromptMode::automatic;
    } else if (mode == "prompted") {
        set.mode = PromptMode::prompted;
    } else {
        throw std::invalid_argument(fmt::format("unknown prompt mode '{}'", mode));
    }
    if (j.contains("box") && !j.at("box").is_null()) {
        set.box = box_from_json(j.at("box"));
    }
    for (auto const& p : j.value("points", json::array())) {
        set.points.push_back(point_from_json(p));
    }
    if (set.mode == PromptMode::automatic && (set.box || !set.points.empty())) {
        throw std::invalid_argument("automatic prompt set must not carry a box or points");
    }
    return set;
}

} // namespace codec

} // namespace promptseg
