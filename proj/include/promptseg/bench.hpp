#pragma once

#include "promptseg/dataset.hpp"
#include "promptseg/eval.hpp"

#include <optional>
#include <string>
#include <vector>

namespace promptseg {

/// Wall-clock milliseconds for one frame. end_to_end covers decode, detection,
/// prompting and segmentation.
struct FrameTiming {
    int index = 0;
    double detect_ms = 0.0;
    double prompt_ms = 0.0;
    double segment_ms = 0.0;
    double end_to_end_ms = 0.0;
    /// As reported by the backend.
    double backend_infer_ms = 0.0;
    std::size_t boxes = 0;
};

struct VideoTiming {
    std::string name;
    std::vector<FrameTiming> frames;
    /// Span from the first measured frame's start to the last one's end.
    double wall_seconds = 0.0;
    double backend_peak_mb = 0.0;

    double mean_ms() const;
    double fps() const;
    double mean_detect_ms() const;
    double mean_segment_ms() const;
};

struct BenchReport {
    std::string model;
    std::string strategy;
    std::optional<double> model_size_mb;
    std::vector<VideoTiming> videos;
    double harness_peak_mb = 0.0;
    double backend_peak_mb = 0.0;

    std::size_t frame_count() const;
    /// Mean of every measured frame's end-to-end time.
    double overall_mean_ms() const;
    /// Measured frames over summed wall time.
    double fps() const;
};

inline constexpr int default_warmup_frames = 3;

/// Sequential detect -> prompt -> segment over every frame; the first
/// `warmup` frames run but are left out of the statistics.
BenchReport profile_video(EvalConfig const& config, VideoSequence const& video, int warmup = default_warmup_frames);

/// Concatenates per-video results of the same model.
BenchReport merge_reports(std::vector<BenchReport> const& reports);

/// Peak resident set of this process.
double harness_peak_memory_mb();

} // namespace promptseg
