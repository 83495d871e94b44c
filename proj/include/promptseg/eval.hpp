#pragma once

#include "promptseg/backend.hpp"
#include "promptseg/dataset.hpp"
#include "promptseg/hsv.hpp"
#include "promptseg/metrics.hpp"
#include "promptseg/prompts.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace promptseg {

/// Boxes keyed by dataset entry key (or frame file name for videos).
using DetectionCache = std::map<std::string, std::vector<BoundingBox>>;

/// JSON lines: {"key": ..., "boxes": [{"x0":..,"y0":..,"x1":..,"y1":..,"conf":..}, ...]}.
DetectionCache read_detection_cache(std::filesystem::path const& path);
void write_detection_cache(DetectionCache const& cache, std::filesystem::path const& path);

/// Live detector; when its spec equals the segmentation backend's, both
/// share one connection.
struct DetectorBoxes {
    BackendSpec detector;
};

/// Boxes derived from the ground truth (see gt_boxes()).
struct GroundTruthBoxes {
    int dilate = 0;
    int min_area = 1;
};

struct CachedBoxes {
    std::filesystem::path path;
    DetectionCache boxes;
};

using BoxSource = std::variant<DetectorBoxes, GroundTruthBoxes, CachedBoxes>;

/// CLI form: detector | gt[:dilate=K,min_area=A] | file:PATH. The detector
/// variant uses `detector`.
BoxSource parse_box_source(std::string const& text, BackendSpec const& detector);
std::string describe(BoxSource const& source);

struct EvalConfig {
    Strategy strategy = Strategy::box;
    BackendSpec backend;
    BoxSource box_source = GroundTruthBoxes{};
    double conf_threshold = 0.3;
    HsvThresholds hsv;
    double mae_scale = default_mae_scale;
    int workers = 1;
    /// Completed per-image rows land here if the run aborts.
    std::optional<std::filesystem::path> partial_results;

    /// Throws std::invalid_argument.
    void validate() const;
};

struct ImageResult {
    std::string key;
    std::size_t boxes = 0;
    std::size_t prompt_sets = 0;
    MetricBundle metrics;
};

struct EvalReport {
    std::string strategy;
    std::string backend;
    std::string model;
    std::string box_source;
    double mae_scale = default_mae_scale;
    std::vector<ImageResult> images;
    MetricBundle mean;

    std::size_t count() const { return images.size(); }
};

/// Called once per image with the merged prediction, possibly from several
/// worker threads at once.
using PredictionSink = std::function<void(DatasetEntry const&, RgbImage const&, BinaryMask const&)>;

/// Detect (or look up) boxes, expand them into prompt sets, segment each set,
/// merge the masks and score against the ground truth. Dataset means are
/// unweighted over images and independent of the worker count.
EvalReport evaluate(EvalConfig const& config, DatasetManifest const& data, PredictionSink const& sink = {});

/// Boxes for one frame under a box source. `shared` is the segmentation
/// backend, reused for detection when the specs match.
std::vector<BoundingBox> boxes_for(BoxSource const& source, std::string const& key, Frame const& frame,
                                   BinaryMask const* gt, double conf_threshold, Backend& shared,
                                   BackendSpec const& shared_spec, std::unique_ptr<Backend>& detector_slot,
                                   HsvThresholds const& th);

/// Merged prediction for one frame: one segment call per prompt set, OR-ed;
/// an empty prompt list gives an empty mask.
struct Prediction {
    BinaryMask mask;
    double infer_ms = 0.0;
    double peak_mem_mb = 0.0;
};
Prediction predict(Backend& backend, Frame const& frame, std::vector<PromptSet> const& sets, BinaryMask const* gt);

} // namespace promptseg
