#pragma once

#include "promptseg/geometry.hpp"
#include "promptseg/hsv.hpp"
#include "promptseg/image.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace promptseg {

enum class PromptMode { automatic, prompted };

/// Prompt bundle for one segmenter call. Automatic sets carry neither box
/// nor points.
struct PromptSet {
    PromptMode mode = PromptMode::prompted;
    std::optional<BoundingBox> box;
    std::vector<PointPrompt> points;

    static PromptSet automatic() { return {PromptMode::automatic, std::nullopt, {}}; }

    friend bool operator==(PromptSet const&, PromptSet const&) = default;
};

enum class Strategy { automatic, sp, sp_sn, mp, box, box_sp, box_mp };

inline constexpr std::array<Strategy, 7> all_strategies = {
    Strategy::automatic, Strategy::sp, Strategy::sp_sn, Strategy::mp,
    Strategy::box,       Strategy::box_sp, Strategy::box_mp,
};

/// Report/CLI label: auto, sp, sp+sn, mp, box, box+sp, box+mp.
std::string_view strategy_name(Strategy s);
/// Accepts the labels above; '_' may stand in for '+'. Throws std::invalid_argument.
Strategy parse_strategy(std::string_view name);

bool uses_box(Strategy s);

PointPrompt centroid_point(BoundingBox const& box);

/// The nine quarter-fraction positions of a box, row-major.
std::array<PointPrompt, 9> grid_candidates(BoundingBox const& box);

/// Fire-coloured subset of the 3x3 grid; the centroid alone when none pass.
std::vector<PointPrompt> grid_points(BoundingBox const& box, RgbImage const& image, HsvThresholds const& th);

/// Picks, on a 16x16 grid of pixel centres, the candidate farthest from every
/// box (max-min Euclidean distance, ties to the smallest (y, x)). Empty when
/// every candidate lies inside a box.
std::optional<PointPrompt> negative_point(std::vector<BoundingBox> const& boxes, int width, int height);

/// Expands detections into per-box prompt sets for the strategy. Automatic
/// yields a single automatic set; any other strategy with no boxes yields
/// nothing.
std::vector<PromptSet> build_prompts(Strategy strategy, std::vector<BoundingBox> const& boxes, RgbImage const& image,
                                     HsvThresholds const& th = {});

/// One-line structured-text form, identical to the prompt fields of a
/// SEGMENT message.
std::string serialize(PromptSet const& set);
PromptSet parse_prompt_set(std::string_view line);

} // namespace promptseg
