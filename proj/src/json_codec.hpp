#pragma once

// Shared JSON shapes for prompts and boxes. Keys are sorted by the json
// object type, which keeps serialized text byte-stable.

#include "promptseg/geometry.hpp"
#include "promptseg/prompts.hpp"

#include <json.hpp>

namespace promptseg::codec {

using json = nlohmann::json;

json box_to_json(BoundingBox const& box);
BoundingBox box_from_json(json const& j);

json point_to_json(PointPrompt const& p);
PointPrompt point_from_json(json const& j);

/// Writes mode, box (when present) and points into `out`.
void write_prompt_fields(PromptSet const& set, json& out);
PromptSet read_prompt_fields(json const& j);

} // namespace promptseg::codec
