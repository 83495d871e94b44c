#include "promptseg/backend.hpp"

#include "promptseg/components.hpp"
#include "promptseg/error.hpp"
#include "promptseg/image_io.hpp"
#include "promptseg/protocol.hpp"
#include "promptseg/rle.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <stdexcept>

#include <unistd.h>

namespace promptseg {

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

void require_gt(BinaryMask const* gt, Frame const& frame, char const* op)
{
    if (gt == nullptr) {
        throw std::invalid_argument(fmt::format("oracle backend: {} needs a ground-truth mask", op));
    }
    if (gt->width() != frame.image.width() || gt->height() != frame.image.height()) {
        throw DimensionMismatch("image", frame.image.width(), frame.image.height(), "ground truth", gt->width(),
                                gt->height());
    }
}

class OracleBackend : public Backend {
  public:
    explicit OracleBackend(std::string name) : name_(name.empty() ? "oracle" : std::move(name)) {}

    std::string const& model_name() const override { return name_; }

    SegmentResponse segment(Frame const& frame, PromptSet const& prompts, BinaryMask const* gt) override
    {
        require_gt(gt, frame, "segment");
        auto const start = std::chrono::steady_clock::now();
        BinaryMask mask = answer(prompts, *gt);
        return {std::move(mask), elapsed_ms(start), 0.0};
    }

    std::vector<BoundingBox> detect(Frame const& frame, double conf_threshold, BinaryMask const* gt) override
    {
        require_gt(gt, frame, "detect");
        auto boxes = gt_boxes(*gt, 0, 1);
        std::erase_if(boxes, [&](BoundingBox const& b) { return b.confidence < conf_threshold; });
        sort_detections(boxes);
        return boxes;
    }

  private:
    static BinaryMask answer(PromptSet const& prompts, BinaryMask const& gt)
    {
        if (prompts.mode == PromptMode::automatic) {
            return gt;
        }
        if (prompts.box) {
            return clip_to_box(gt, *prompts.box);
        }
        auto const map = label_components(gt);
        std::vector<std::int32_t> keep;
        std::vector<std::int32_t> drop;
        for (auto const& p : prompts.points) {
            if (p.x < 0 || p.y < 0 || p.x >= gt.width() || p.y >= gt.height()) {
                continue;
            }
            auto const label = map.label_at(p.x, p.y);
            if (label != 0) {
                (p.positive() ? keep : drop).push_back(label);
            }
        }
        std::erase_if(keep, [&](std::int32_t l) { return std::find(drop.begin(), drop.end(), l) != drop.end(); });
        return select_components(map, keep);
    }

    std::string name_;
};

class HsvBackend : public Backend {
  public:
    HsvBackend(std::string name, HsvThresholds th) : name_(name.empty() ? "hsv" : std::move(name)), th_(std::move(th))
    {
        th_.validate();
    }

    std::string const& model_name() const override { return name_; }

    SegmentResponse segment(Frame const& frame, PromptSet const& prompts, BinaryMask const*) override
    {
        auto const start = std::chrono::steady_clock::now();
        BinaryMask mask = hsv_mask(frame.image, th_);
        if (prompts.mode == PromptMode::prompted && prompts.box) {
            mask = clip_to_box(mask, *prompts.box);
        }
        return {std::move(mask), elapsed_ms(start), 0.0};
    }

    /// Components of the colour mask; confidence is the fire-coloured
    /// fraction of each component's box.
    std::vector<BoundingBox> detect(Frame const& frame, double conf_threshold, BinaryMask const*) override
    {
        auto const map = label_components(hsv_mask(frame.image, th_));
        std::vector<BoundingBox> boxes;
        for (auto const& c : map.components) {
            BoundingBox b = c.box;
            b.confidence = static_cast<double>(c.area) / static_cast<double>(b.area());
            if (b.confidence >= conf_threshold) {
                boxes.push_back(b);
            }
        }
        sort_detections(boxes);
        return boxes;
    }

  private:
    std::string name_;
    HsvThresholds th_;
};

class ExternalBackend : public Backend {
  public:
    ExternalBackend(std::unique_ptr<LineChannel> channel, std::string name)
        : channel_(std::move(channel)), name_(std::move(name))
    {
        channel_->send_line(protocol::format_message(protocol::Hello{protocol::version, name_}));
        auto const reply = expect<protocol::Hello>(channel_->receive_line(), "HELLO");
        if (reply.protocol_version != protocol::version) {
            throw BackendError(fmt::format("{}: protocol version mismatch: client speaks {}, server speaks {}",
                                           channel_->describe(), protocol::version, reply.protocol_version));
        }
        if (name_.empty()) {
            name_ = reply.model_name.empty() ? channel_->describe() : reply.model_name;
        }
        spdlog::debug("connected to {} ({})", channel_->describe(), name_);
    }

    ~ExternalBackend() override
    {
        if (!spill_dir_.empty()) {
            std::error_code ec;
            std::filesystem::remove_all(spill_dir_, ec);
        }
    }

    std::string const& model_name() const override { return name_; }

    SegmentResponse segment(Frame const& frame, PromptSet const& prompts, BinaryMask const*) override
    {
        protocol::Segment req{image_path(frame), frame.image.width(), frame.image.height(), prompts, true};
        channel_->send_line(protocol::format_message(req));
        auto const reply = expect<protocol::Mask>(channel_->receive_line(), "MASK");
        if (reply.infer_ms < 0.0 || reply.peak_mem_mb < 0.0) {
            throw BackendError(fmt::format("{}: negative timing or memory in MASK reply", channel_->describe()));
        }
        try {
            return {decode_mask(reply.rle, req.width, req.height), reply.infer_ms, reply.peak_mem_mb};
        } catch (std::invalid_argument const& e) {
            throw BackendError(fmt::format("{}: response mask does not fit the {}x{} request: {}",
                                           channel_->describe(), req.width, req.height, e.what()));
        }
    }

    std::vector<BoundingBox> detect(Frame const& frame, double conf_threshold, BinaryMask const*) override
    {
        channel_->send_line(protocol::format_message(protocol::Detect{image_path(frame), conf_threshold}));
        auto reply = expect<protocol::Boxes>(channel_->receive_line(), "BOXES");
        std::vector<BoundingBox> boxes;
        for (auto const& b : reply.boxes) {
            if (!b.valid_for(frame.image.width(), frame.image.height())) {
                throw BackendError(fmt::format("{}: detector returned box ({},{},{},{}) outside the {}x{} image",
                                               channel_->describe(), b.x0, b.y0, b.x1, b.y1, frame.image.width(),
                                               frame.image.height()));
            }
            if (b.confidence >= conf_threshold) {
                boxes.push_back(b);
            }
        }
        sort_detections(boxes);
        return boxes;
    }

  private:
    template <class T>
    T expect(std::string const& line, char const* verb)
    {
        auto msg = protocol::parse_message(line);
        if (auto* err = std::get_if<protocol::Error>(&msg)) {
            throw BackendError(fmt::format("{}: server error {}: {}", channel_->describe(), err->code, err->message));
        }
        if (auto* ok = std::get_if<T>(&msg)) {
            return std::move(*ok);
        }
        throw BackendError(
            fmt::format("{}: expected {} but got {}", channel_->describe(), verb, protocol::verb_of(msg)));
    }

    std::string image_path(Frame const& frame)
    {
        if (!frame.path.empty()) {
            return std::filesystem::absolute(frame.path).string();
        }
        if (spill_dir_.empty()) {
            static std::atomic<int> counter{0};
            spill_dir_ = std::filesystem::temp_directory_path() /
                         fmt::format("promptseg-{}-{}", ::getpid(), counter.fetch_add(1));
            std::filesystem::create_directories(spill_dir_);
        }
        auto const path = spill_dir_ / fmt::format("frame-{}.png", spill_count_++);
        write_png(path, frame.image);
        return path.string();
    }

    std::unique_ptr<LineChannel> channel_;
    std::string name_;
    std::filesystem::path spill_dir_;
    int spill_count_ = 0;
};

} // namespace

BackendSpec BackendSpec::parse(std::string const& text)
{
    BackendSpec spec;
    if (text == "oracle") {
        spec.kind = BackendKind::oracle;
    } else if (text == "hsv" || text == "hsv_threshold") {
        spec.kind = BackendKind::hsv_threshold;
    } else if (text.starts_with("exec:") || text.starts_with("tcp:")) {
        spec.kind = BackendKind::external;
        spec.endpoint = text;
    } else {
        throw std::invalid_argument(
            fmt::format("unknown backend '{}' (expected oracle, hsv, exec:CMD or tcp:HOST:PORT)", text));
    }
    spec.validate();
    return spec;
}

std::string BackendSpec::to_string() const
{
    switch (kind) {
    case BackendKind::oracle:
        return "oracle";
    case BackendKind::hsv_threshold:
        return "hsv";
    case BackendKind::external:
        return endpoint;
    }
    return {};
}

void BackendSpec::validate() const
{
    if (kind != BackendKind::external) {
        return;
    }
    bool const exec = endpoint.starts_with("exec:") && endpoint.size() > 5;
    bool const tcp = endpoint.starts_with("tcp:") && endpoint.size() > 4;
    if (!exec && !tcp) {
        throw std::invalid_argument("external backend requires an exec:CMD or tcp:HOST:PORT endpoint");
    }
}

std::unique_ptr<Backend> open_backend(BackendSpec const& spec, HsvThresholds const& th)
{
    spec.validate();
    switch (spec.kind) {
    case BackendKind::oracle:
        return std::make_unique<OracleBackend>(spec.model_name);
    case BackendKind::hsv_threshold:
        return std::make_unique<HsvBackend>(spec.model_name, th);
    case BackendKind::external:
        if (spec.endpoint.starts_with("exec:")) {
            return open_external(spawn_process(spec.endpoint.substr(5)), spec.model_name);
        }
        return open_external(connect_tcp(spec.endpoint.substr(4)), spec.model_name);
    }
    throw std::invalid_argument("unknown backend kind");
}

std::unique_ptr<Backend> open_external(std::unique_ptr<LineChannel> channel, std::string model_name)
{
    return std::make_unique<ExternalBackend>(std::move(channel), std::move(model_name));
}

std::vector<BoundingBox> gt_boxes(BinaryMask const& gt, int dilate, int min_area)
{
    if (dilate < 0) {
        throw std::invalid_argument("gt_boxes: dilate must be >= 0");
    }
    std::vector<BoundingBox> out;
    for (auto const& c : label_components(gt).components) {
        if (static_cast<long>(c.area) < min_area) {
            continue;
        }
        BoundingBox b = c.box;
        b.x0 = std::max(0, b.x0 - dilate);
        b.y0 = std::max(0, b.y0 - dilate);
        b.x1 = std::min(gt.width(), b.x1 + dilate);
        b.y1 = std::min(gt.height(), b.y1 + dilate);
        b.confidence = 1.0;
        out.push_back(b);
    }
    sort_detections(out);
    return out;
}

void sort_detections(std::vector<BoundingBox>& boxes)
{
    std::stable_sort(boxes.begin(), boxes.end(), [](BoundingBox const& a, BoundingBox const& b) {
        if (a.confidence != b.confidence) {
            return a.confidence > b.confidence;
        }
        if (a.y0 != b.y0) {
            return a.y0 < b.y0;
        }
        return a.x0 < b.x0;
    });
}

BinaryMask hsv_mask(RgbImage const& image, HsvThresholds const& th)
{
    std::vector<std::uint8_t> bits(image.pixels().size());
    std::transform(image.pixels().begin(), image.pixels().end(), bits.begin(),
                   [&th](Rgb c) { return is_fire_colored(c, th) ? 1 : 0; });
    return BinaryMask(image.width(), image.height(), std::move(bits));
}

} // namespace promptseg
