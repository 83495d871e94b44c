#include "promptseg/eval.hpp"

#include "json_codec.hpp"
#include "promptseg/error.hpp"
#include "promptseg/image_io.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <atomic>
#include <charconv>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

namespace promptseg {

namespace fs = std::filesystem;
using codec::json;

DetectionCache read_detection_cache(fs::path const& path)
{
    std::ifstream in(path);
    if (!in) {
        throw DatasetError(fmt::format("cannot open detection cache '{}'", path.string()));
    }
    DetectionCache cache;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            auto const j = json::parse(line);
            auto& boxes = cache[j.at("key").get<std::string>()];
            for (auto const& b : j.at("boxes")) {
                boxes.push_back(codec::box_from_json(b));
            }
        } catch (json::exception const& e) {
            throw DatasetError(fmt::format("{}:{}: malformed cache row: {}", path.string(), line_no, e.what()));
        }
    }
    return cache;
}

void write_detection_cache(DetectionCache const& cache, fs::path const& path)
{
    std::ofstream out(path);
    if (!out) {
        throw Error(fmt::format("cannot write detection cache '{}'", path.string()));
    }
    for (auto const& [key, boxes] : cache) {
        json list = json::array();
        for (auto const& b : boxes) {
            list.push_back(codec::box_to_json(b));
        }
        out << json{{"key", key}, {"boxes", std::move(list)}}.dump() << '\n';
    }
}

BoxSource parse_box_source(std::string const& text, BackendSpec const& detector)
{
    if (text == "detector") {
        return DetectorBoxes{detector};
    }
    if (text.starts_with("file:")) {
        CachedBoxes c;
        c.path = text.substr(5);
        c.boxes = read_detection_cache(c.path);
        return c;
    }
    if (text == "gt" || text.starts_with("gt:")) {
        GroundTruthBoxes g;
        std::string_view rest = text.size() > 3 ? std::string_view(text).substr(3) : std::string_view{};
        while (!rest.empty()) {
            auto const comma = rest.find(',');
            auto const item = rest.substr(0, comma);
            auto const eq = item.find('=');
            if (eq == std::string_view::npos) {
                throw std::invalid_argument(fmt::format("box source '{}': expected key=value, got '{}'", text, item));
            }
            auto const key = item.substr(0, eq);
            auto const value = item.substr(eq + 1);
            int v = 0;
            auto const [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
            if (ec != std::errc{} || end != value.data() + value.size() || v < 0) {
                throw std::invalid_argument(fmt::format("box source '{}': bad value for {}", text, key));
            }
            if (key == "dilate") {
                g.dilate = v;
            } else if (key == "min_area") {
                g.min_area = v;
            } else {
                throw std::invalid_argument(fmt::format("box source '{}': unknown key '{}'", text, key));
            }
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        }
        return g;
    }
    throw std::invalid_argument(
        fmt::format("unknown box source '{}' (expected detector, gt[:dilate=K,min_area=A] or file:PATH)", text));
}

std::string describe(BoxSource const& source)
{
    if (auto const* d = std::get_if<DetectorBoxes>(&source)) {
        return fmt::format("detector:{}", d->detector.to_string());
    }
    if (auto const* g = std::get_if<GroundTruthBoxes>(&source)) {
        return fmt::format("gt:dilate={},min_area={}", g->dilate, g->min_area);
    }
    return fmt::format("file:{}", std::get<CachedBoxes>(source).path.string());
}

void EvalConfig::validate() const
{
    if (workers < 1) {
        throw std::invalid_argument("worker count must be at least 1");
    }
    if (!(conf_threshold >= 0.0 && conf_threshold <= 1.0)) {
        throw std::invalid_argument("confidence threshold must lie in [0, 1]");
    }
    if (!(mae_scale > 0.0)) {
        throw std::invalid_argument("MAE scale must be positive");
    }
    backend.validate();
    hsv.validate();
    if (auto const* d = std::get_if<DetectorBoxes>(&box_source)) {
        d->detector.validate();
    }
}

std::vector<BoundingBox> boxes_for(BoxSource const& source, std::string const& key, Frame const& frame,
                                   BinaryMask const* gt, double conf_threshold, Backend& shared,
                                   BackendSpec const& shared_spec, std::unique_ptr<Backend>& detector_slot,
                                   HsvThresholds const& th)
{
    if (auto const* g = std::get_if<GroundTruthBoxes>(&source)) {
        if (gt == nullptr) {
            throw DatasetError(fmt::format("'{}': ground-truth boxes need a mask", key));
        }
        return gt_boxes(*gt, g->dilate, g->min_area);
    }
    if (auto const* c = std::get_if<CachedBoxes>(&source)) {
        auto const it = c->boxes.find(key);
        if (it == c->boxes.end()) {
            throw DatasetError(fmt::format("'{}' is missing from detection cache '{}'", key, c->path.string()));
        }
        std::vector<BoundingBox> boxes;
        for (auto const& b : it->second) {
            require_valid_box(b, frame.image.width(), frame.image.height());
            if (b.confidence >= conf_threshold) {
                boxes.push_back(b);
            }
        }
        sort_detections(boxes);
        return boxes;
    }
    auto const& d = std::get<DetectorBoxes>(source);
    if (d.detector == shared_spec) {
        return shared.detect(frame, conf_threshold, gt);
    }
    if (!detector_slot) {
        detector_slot = open_backend(d.detector, th);
    }
    return detector_slot->detect(frame, conf_threshold, gt);
}

Prediction predict(Backend& backend, Frame const& frame, std::vector<PromptSet> const& sets, BinaryMask const* gt)
{
    Prediction out{BinaryMask(frame.image.width(), frame.image.height())};
    if (sets.empty()) {
        return out;
    }
    std::vector<BinaryMask> masks;
    masks.reserve(sets.size());
    for (auto const& set : sets) {
        auto r = backend.segment(frame, set, gt);
        out.infer_ms += r.infer_ms;
        out.peak_mem_mb = std::max(out.peak_mem_mb, r.peak_mem_mb);
        masks.push_back(std::move(r.mask));
    }
    out.mask = union_masks(masks);
    return out;
}

namespace {

void flush_partial(fs::path const& path, std::vector<std::optional<ImageResult>> const& results)
{
    std::ofstream out(path);
    out << "key,boxes,prompt_sets,pa,ma,miou,fwiou,dice,mae_raw,mae_scaled\n";
    for (auto const& r : results) {
        if (!r) {
            continue;
        }
        auto const& m = r->metrics;
        out << fmt::format("{},{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}\n", r->key, r->boxes,
                           r->prompt_sets, m.pa, m.ma, m.miou, m.fwiou, m.dice, m.mae_raw, m.mae_scaled);
    }
}

} // namespace

EvalReport evaluate(EvalConfig const& config, DatasetManifest const& data, PredictionSink const& sink)
{
    config.validate();
    for (auto const& e : data.entries) {
        if (!e.mask) {
            throw DatasetError(fmt::format("'{}' has no ground-truth mask", e.key));
        }
    }

    std::vector<std::optional<ImageResult>> results(data.entries.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::string model_name;

    auto worker = [&](bool record_name) {
        try {
            auto backend = open_backend(config.backend, config.hsv);
            if (record_name) {
                model_name = backend->model_name();
            }
            std::unique_ptr<Backend> detector;
            for (std::size_t i = next++; i < data.entries.size() && !failed; i = next++) {
                auto const& entry = data.entries[i];
                Frame frame{entry.image, read_rgb(entry.image)};
                BinaryMask const gt = read_mask(*entry.mask);
                if (gt.width() != frame.image.width() || gt.height() != frame.image.height()) {
                    throw DimensionMismatch(entry.key, frame.image.width(), frame.image.height(), "its mask",
                                            gt.width(), gt.height());
                }
                auto const boxes = boxes_for(config.box_source, entry.key, frame, &gt, config.conf_threshold,
                                             *backend, config.backend, detector, config.hsv);
                auto const sets = build_prompts(config.strategy, boxes, frame.image, config.hsv);
                auto const pred = predict(*backend, frame, sets, &gt);
                if (sink) {
                    sink(entry, frame.image, pred.mask);
                }
                results[i] = ImageResult{entry.key, boxes.size(), sets.size(),
                                         compute_metrics(pred.mask, gt, config.mae_scale)};
                spdlog::debug("{}: {} boxes, {} prompt sets", entry.key, boxes.size(), sets.size());
            }
        } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!first_error) {
                first_error = std::current_exception();
            }
            failed = true;
        }
    };

    auto const n_workers = std::min<std::size_t>(static_cast<std::size_t>(config.workers),
                                                  std::max<std::size_t>(data.entries.size(), 1));
    if (n_workers <= 1) {
        worker(true);
    } else {
        std::vector<std::jthread> pool;
        pool.emplace_back(worker, true);
        for (std::size_t w = 1; w < n_workers; ++w) {
            pool.emplace_back(worker, false);
        }
    }

    if (first_error) {
        if (config.partial_results) {
            flush_partial(*config.partial_results, results);
            spdlog::error("evaluation aborted; completed rows written to {}", config.partial_results->string());
        }
        std::rethrow_exception(first_error);
    }

    EvalReport report;
    report.strategy = std::string(strategy_name(config.strategy));
    report.backend = config.backend.to_string();
    report.model = model_name.empty() ? report.backend : model_name;
    report.box_source = describe(config.box_source);
    report.mae_scale = config.mae_scale;
    std::vector<MetricBundle> bundles;
    for (auto& r : results) {
        bundles.push_back(r->metrics);
        report.images.push_back(std::move(*r));
    }
    if (!bundles.empty()) {
        report.mean = mean_bundle(bundles);
    }
    return report;
}

} // namespace promptseg
