#pragma once

#include "promptseg/geometry.hpp"
#include "promptseg/prompts.hpp"

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace promptseg::protocol {

/// Bumped on any incompatible change to the message shapes in docs/protocol.md.
inline constexpr int version = 1;

struct Hello {
    int protocol_version = version;
    std::string model_name;

    friend bool operator==(Hello const&, Hello const&) = default;
};

struct Segment {
    std::string image_path;
    int width = 0;
    int height = 0;
    PromptSet prompts;
    bool want_memory = true;

    friend bool operator==(Segment const&, Segment const&) = default;
};

struct Mask {
    std::string rle;
    double infer_ms = 0.0;
    double peak_mem_mb = 0.0;

    friend bool operator==(Mask const&, Mask const&) = default;
};

struct Detect {
    std::string image_path;
    double conf = 0.3;

    friend bool operator==(Detect const&, Detect const&) = default;
};

struct Boxes {
    std::vector<BoundingBox> boxes;

    friend bool operator==(Boxes const&, Boxes const&) = default;
};

struct Error {
    std::string code;
    std::string message;

    friend bool operator==(Error const&, Error const&) = default;
};

using Message = std::variant<Hello, Segment, Mask, Detect, Boxes, Error>;

/// "VERB {json}" on a single line, without the trailing newline.
std::string format_message(Message const& msg);

/// Throws BackendError on an unknown verb or malformed payload.
Message parse_message(std::string_view line);

std::string_view verb_of(Message const& msg);

} // namespace promptseg::protocol
