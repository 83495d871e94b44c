#pragma once

#include "promptseg/geometry.hpp"
#include "promptseg/hsv.hpp"
#include "promptseg/image.hpp"
#include "promptseg/mask.hpp"
#include "promptseg/prompts.hpp"
#include "promptseg/transport.hpp"

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace promptseg {

enum class BackendKind { oracle, hsv_threshold, external };

struct BackendSpec {
    BackendKind kind = BackendKind::oracle;
    /// "exec:CMD" or "tcp:HOST:PORT"; external only.
    std::string endpoint;
    /// Report label. External backends fill it from the server's HELLO when empty.
    std::string model_name;

    /// Parses the CLI form: oracle | hsv | exec:CMD | tcp:ADDR.
    static BackendSpec parse(std::string const& text);
    /// Inverse of parse().
    std::string to_string() const;
    /// Throws std::invalid_argument when an external spec has no endpoint.
    void validate() const;

    friend bool operator==(BackendSpec const&, BackendSpec const&) = default;
};

/// An image together with the file it came from. External backends receive
/// the path; an empty path makes them spill the pixels to a temporary PNG.
struct Frame {
    std::filesystem::path path;
    RgbImage image;
};

struct SegmentResponse {
    BinaryMask mask;
    double infer_ms = 0.0;
    double peak_mem_mb = 0.0;
};

/// One open connection to a segmentation/detection provider. Not thread-safe;
/// open one per worker.
class Backend {
  public:
    virtual ~Backend() = default;

    virtual std::string const& model_name() const = 0;

    /// `gt` is required by the oracle and ignored by everything else.
    virtual SegmentResponse segment(Frame const& frame, PromptSet const& prompts, BinaryMask const* gt) = 0;

    /// Boxes with confidence >= conf_threshold, best first, ties by (y0, x0).
    virtual std::vector<BoundingBox> detect(Frame const& frame, double conf_threshold, BinaryMask const* gt) = 0;
};

std::unique_ptr<Backend> open_backend(BackendSpec const& spec, HsvThresholds const& th = {});

/// External backend over an existing channel; performs the HELLO handshake.
std::unique_ptr<Backend> open_external(std::unique_ptr<LineChannel> channel, std::string model_name = {});

/// Bounding boxes of the 4-connected components with area >= min_area,
/// grown by `dilate` pixels per side and clamped to the image; confidence 1.
std::vector<BoundingBox> gt_boxes(BinaryMask const& gt, int dilate = 0, int min_area = 1);

/// Descending confidence, then ascending (y0, x0).
void sort_detections(std::vector<BoundingBox>& boxes);

/// Per-pixel fire-colour mask of a whole image.
BinaryMask hsv_mask(RgbImage const& image, HsvThresholds const& th);

} // namespace promptseg
