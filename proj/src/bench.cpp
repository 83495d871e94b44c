#include "promptseg/bench.hpp"

#include "promptseg/error.hpp"
#include "promptseg/image_io.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <numeric>
#include <stdexcept>

#include <sys/resource.h>

namespace promptseg {

namespace {

using Clock = std::chrono::steady_clock;

double ms_between(Clock::time_point a, Clock::time_point b)
{
    return std::chrono::duration<double, std::milli>(b - a).count();
}

template <class F>
double mean_of(std::vector<FrameTiming> const& frames, F field)
{
    if (frames.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (auto const& f : frames) {
        sum += field(f);
    }
    return sum / static_cast<double>(frames.size());
}

} // namespace

double VideoTiming::mean_ms() const
{
    return mean_of(frames, [](FrameTiming const& f) { return f.end_to_end_ms; });
}

double VideoTiming::mean_detect_ms() const
{
    return mean_of(frames, [](FrameTiming const& f) { return f.detect_ms; });
}

double VideoTiming::mean_segment_ms() const
{
    return mean_of(frames, [](FrameTiming const& f) { return f.segment_ms; });
}

double VideoTiming::fps() const
{
    return wall_seconds > 0.0 ? static_cast<double>(frames.size()) / wall_seconds : 0.0;
}

std::size_t BenchReport::frame_count() const
{
    return std::accumulate(videos.begin(), videos.end(), std::size_t{0},
                           [](std::size_t n, VideoTiming const& v) { return n + v.frames.size(); });
}

double BenchReport::overall_mean_ms() const
{
    double sum = 0.0;
    for (auto const& v : videos) {
        for (auto const& f : v.frames) {
            sum += f.end_to_end_ms;
        }
    }
    auto const n = frame_count();
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

double BenchReport::fps() const
{
    double wall = 0.0;
    for (auto const& v : videos) {
        wall += v.wall_seconds;
    }
    return wall > 0.0 ? static_cast<double>(frame_count()) / wall : 0.0;
}

double harness_peak_memory_mb()
{
    rusage usage{};
    ::getrusage(RUSAGE_SELF, &usage);
    // ru_maxrss is in kilobytes on Linux.
    return static_cast<double>(usage.ru_maxrss) / 1024.0;
}

BenchReport profile_video(EvalConfig const& config, VideoSequence const& video, int warmup)
{
    config.validate();
    if (warmup < 0 || static_cast<std::size_t>(warmup) >= video.size()) {
        throw std::invalid_argument(
            fmt::format("warmup ({}) must be smaller than the frame count ({})", warmup, video.size()));
    }
    bool const needs_gt = config.backend.kind == BackendKind::oracle ||
                          std::holds_alternative<GroundTruthBoxes>(config.box_source) ||
                          (std::holds_alternative<DetectorBoxes>(config.box_source) &&
                           std::get<DetectorBoxes>(config.box_source).detector.kind == BackendKind::oracle);

    auto backend = open_backend(config.backend, config.hsv);
    std::unique_ptr<Backend> detector;

    VideoTiming timing;
    timing.name = video.name;
    Clock::time_point measured_start{};

    for (std::size_t i = 0; i < video.size(); ++i) {
        bool const measured = i >= static_cast<std::size_t>(warmup);
        auto const t0 = Clock::now();
        if (measured && i == static_cast<std::size_t>(warmup)) {
            measured_start = t0;
        }

        Frame frame{video.frames[i], read_rgb(video.frames[i])};
        std::optional<BinaryMask> gt;
        if (needs_gt) {
            if (video.masks.empty() || !video.masks[i]) {
                throw DatasetError(fmt::format("{}: frame {} has no mask but the configuration needs ground truth",
                                               video.name, video.indices[i]));
            }
            gt = read_mask(*video.masks[i]);
        }
        BinaryMask const* gt_ptr = gt ? &*gt : nullptr;

        auto const t1 = Clock::now();
        auto const boxes = boxes_for(config.box_source, video.frames[i].filename().string(), frame, gt_ptr,
                                     config.conf_threshold, *backend, config.backend, detector, config.hsv);
        auto const t2 = Clock::now();
        auto const sets = build_prompts(config.strategy, boxes, frame.image, config.hsv);
        auto const t3 = Clock::now();
        auto const pred = predict(*backend, frame, sets, gt_ptr);
        auto const t4 = Clock::now();

        if (!measured) {
            continue;
        }
        FrameTiming f;
        f.index = video.indices[i];
        f.detect_ms = ms_between(t1, t2);
        f.prompt_ms = ms_between(t2, t3);
        f.segment_ms = ms_between(t3, t4);
        f.end_to_end_ms = ms_between(t0, t4);
        f.backend_infer_ms = pred.infer_ms;
        f.boxes = boxes.size();
        timing.frames.push_back(f);
        timing.backend_peak_mb = std::max(timing.backend_peak_mb, pred.peak_mem_mb);
        timing.wall_seconds = std::chrono::duration<double>(t4 - measured_start).count();
    }

    spdlog::info("{}: {} frames measured, {:.2f} ms/frame", video.name, timing.frames.size(), timing.mean_ms());

    BenchReport report;
    report.model = backend->model_name();
    report.strategy = std::string(strategy_name(config.strategy));
    report.backend_peak_mb = timing.backend_peak_mb;
    report.videos.push_back(std::move(timing));
    report.harness_peak_mb = harness_peak_memory_mb();
    return report;
}

BenchReport merge_reports(std::vector<BenchReport> const& reports)
{
    if (reports.empty()) {
        throw std::invalid_argument("no bench reports to merge");
    }
    BenchReport out;
    out.model = reports.front().model;
    out.strategy = reports.front().strategy;
    out.model_size_mb = reports.front().model_size_mb;
    for (auto const& r : reports) {
        out.videos.insert(out.videos.end(), r.videos.begin(), r.videos.end());
        out.harness_peak_mb = std::max(out.harness_peak_mb, r.harness_peak_mb);
        out.backend_peak_mb = std::max(out.backend_peak_mb, r.backend_peak_mb);
    }
    return out;
}

} // namespace promptseg
