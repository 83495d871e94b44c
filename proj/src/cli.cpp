#include "promptseg/cli.hpp"

#include "promptseg/backend.hpp"
#include "promptseg/bench.hpp"
#include "promptseg/dataset.hpp"
#include "promptseg/error.hpp"
#include "promptseg/eval.hpp"
#include "promptseg/image_io.hpp"
#include "promptseg/overlay.hpp"
#include "promptseg/protocol.hpp"
#include "promptseg/report.hpp"
#include "promptseg/rle.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <filesystem>
#include <ostream>
#include <stdexcept>

#include <unistd.h>

namespace promptseg::cli {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct CommonFlags {
    std::string backend = "oracle";
    std::string detector;
    std::string box_source;
    std::string strategy = "box";
    double conf = 0.3;
    std::string hsv_h = "0-65,340-360";
    std::string hsv_s = "0.2-1";
    std::string hsv_v = "0.5-1";
    double mae_scale = default_mae_scale;
    int workers = 1;
    std::string model;
};

struct DataFlags {
    std::string manifest;
    std::string images;
    std::string masks;
};

void add_backend_flags(CLI::App* cmd, CommonFlags& f, std::string const& default_box_source)
{
    f.box_source = default_box_source;
    cmd->add_option("--backend", f.backend, "oracle | hsv | exec:CMD | tcp:HOST:PORT");
    cmd->add_option("--detector", f.detector, "Detector backend for --box-source detector (default: --backend)");
    cmd->add_option("--box-source", f.box_source, "detector | gt[:dilate=K,min_area=A] | file:PATH");
    cmd->add_option("--conf", f.conf, "Detector confidence threshold")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--hsv-h", f.hsv_h, "Fire hue ranges in degrees, e.g. 0-65,340-360");
    cmd->add_option("--hsv-s", f.hsv_s, "Fire saturation range");
    cmd->add_option("--hsv-v", f.hsv_v, "Fire value range");
    cmd->add_option("--model", f.model, "Model label for reports (default: backend-reported name)");
}

void add_data_flags(CLI::App* cmd, DataFlags& d)
{
    auto* manifest = cmd->add_option("--manifest", d.manifest, "JSON-lines dataset manifest");
    auto* images = cmd->add_option("--images", d.images, "Image directory (paired with --masks by file stem)");
    auto* masks = cmd->add_option("--masks", d.masks, "Mask directory");
    images->needs(masks);
    masks->needs(images);
    manifest->excludes(images);
}

HsvThresholds thresholds(CommonFlags const& f)
{
    HsvThresholds th;
    try {
        th.hue = parse_ranges(f.hsv_h);
        auto const s = parse_ranges(f.hsv_s);
        auto const v = parse_ranges(f.hsv_v);
        if (s.size() != 1 || v.size() != 1) {
            throw std::invalid_argument("saturation and value take a single lo-hi range");
        }
        th.saturation = s.front();
        th.value = v.front();
        th.validate();
    } catch (std::invalid_argument const& e) {
        throw UsageError(e.what());
    }
    return th;
}

EvalConfig make_config(CommonFlags const& f, Strategy strategy)
{
    EvalConfig c;
    try {
        c.strategy = strategy;
        c.backend = BackendSpec::parse(f.backend);
        c.backend.model_name = f.model;
        auto const detector = f.detector.empty() ? c.backend : BackendSpec::parse(f.detector);
        c.hsv = thresholds(f);
        c.box_source = parse_box_source(f.box_source, detector);
        c.conf_threshold = f.conf;
        c.mae_scale = f.mae_scale;
        c.workers = f.workers;
        c.validate();
    } catch (DatasetError const&) {
        throw;
    } catch (std::invalid_argument const& e) {
        throw UsageError(e.what());
    }
    return c;
}

std::vector<Strategy> parse_strategy_list(std::string const& text)
{
    if (text == "all") {
        return {all_strategies.begin(), all_strategies.end()};
    }
    std::vector<Strategy> out;
    std::string_view rest = text;
    try {
        while (!rest.empty()) {
            auto const comma = rest.find(',');
            out.push_back(parse_strategy(rest.substr(0, comma)));
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        }
    } catch (std::invalid_argument const& e) {
        throw UsageError(e.what());
    }
    if (out.empty()) {
        throw UsageError("--strategy is empty");
    }
    return out;
}

DatasetManifest load_data(DataFlags const& d)
{
    if (!d.manifest.empty()) {
        return load_manifest(d.manifest);
    }
    if (!d.images.empty()) {
        return pair_by_stem(d.images, d.masks);
    }
    throw UsageError("one of --manifest or --images/--masks is required");
}

fs::path prepare_out_dir(std::string const& out)
{
    fs::path dir(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw Error(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
    }
    return dir;
}

void write_run_config(CLI::App const& app, CLI::App const* cmd, fs::path const& dir, std::ostream& out)
{
    auto const path = dir / "run_config.toml";
    std::string text = fmt::format("# promptseg {}\n", cmd->get_name());
    text += cmd->config_to_str(true, false);
    (void)app;
    write_text(path, text);
    out << path.string() << '\n';
}

int cmd_evaluate(CLI::App const& app, CLI::App const* cmd, CommonFlags const& f, DataFlags const& d,
                 std::string const& out_dir, std::string const& overlay_dir, std::string const& overlay_color,
                 double alpha, std::ostream& out)
{
    auto const strategies = parse_strategy_list(f.strategy);
    std::vector<EvalConfig> configs;
    for (auto s : strategies) {
        configs.push_back(make_config(f, s));
    }
    Rgb color{};
    try {
        color = parse_color(overlay_color);
    } catch (std::invalid_argument const& e) {
        throw UsageError(e.what());
    }
    auto const data = load_data(d);
    auto const dir = prepare_out_dir(out_dir);
    if (!overlay_dir.empty()) {
        fs::create_directories(overlay_dir);
    }

    std::vector<EvalReport> reports;
    std::string per_image;
    for (auto& config : configs) {
        config.partial_results = dir / "partial_results.csv";
        PredictionSink sink;
        if (!overlay_dir.empty()) {
            auto const tag = std::string(strategy_name(config.strategy));
            sink = [&, tag](DatasetEntry const& e, RgbImage const& image, BinaryMask const& pred) {
                auto name = fmt::format("{}_{}.png", fs::path(e.key).stem().string(), tag);
                std::replace(name.begin(), name.end(), '+', '-');
                write_png(fs::path(overlay_dir) / name, render_overlay(image, pred, color, alpha));
            };
        }
        reports.push_back(evaluate(config, data, sink));
        auto rows = render_per_image(reports.back());
        per_image += reports.size() == 1 ? rows : rows.substr(rows.find('\n') + 1);
    }

    emit_report(reports, ReportFormat::csv, dir / "eval.csv");
    emit_report(reports, ReportFormat::markdown, dir / "eval.md");
    write_text(dir / "per_image.csv", per_image);
    out << (dir / "eval.csv").string() << '\n' << (dir / "eval.md").string() << '\n';
    out << (dir / "per_image.csv").string() << '\n';
    write_run_config(app, cmd, dir, out);
    return exit_ok;
}

int cmd_bench(CLI::App const& app, CLI::App const* cmd, CommonFlags const& f, std::vector<std::string> const& frames,
              std::vector<std::string> const& masks, int warmup, std::optional<double> size_mb,
              std::string const& out_dir, std::ostream& out)
{
    if (!masks.empty() && masks.size() != frames.size()) {
        throw UsageError("--masks must be given once per --frames directory or not at all");
    }
    auto const config = make_config(f, parse_strategy(f.strategy));
    std::vector<VideoSequence> videos;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        videos.push_back(load_video(frames[i], masks.empty() ? std::nullopt : std::optional<fs::path>(masks[i])));
        if (warmup < 0 || static_cast<std::size_t>(warmup) >= videos.back().size()) {
            throw UsageError(fmt::format("--warmup {} must be smaller than the {} frames of '{}'", warmup,
                                         videos.back().size(), frames[i]));
        }
    }
    auto const dir = prepare_out_dir(out_dir);

    std::vector<BenchReport> runs;
    for (auto const& v : videos) {
        runs.push_back(profile_video(config, v, warmup));
    }
    auto report = merge_reports(runs);
    report.model_size_mb = size_mb;
    if (!f.model.empty()) {
        report.model = f.model;
    }

    emit_report(report, ReportFormat::csv, dir / "bench.csv");
    emit_report(report, ReportFormat::markdown, dir / "bench.md");
    write_text(dir / "frames.csv", render_frames(report));
    out << (dir / "bench.csv").string() << '\n' << (dir / "bench.md").string() << '\n';
    out << (dir / "frames.csv").string() << '\n';
    write_run_config(app, cmd, dir, out);
    return exit_ok;
}

int cmd_detect_cache(CommonFlags const& f, DataFlags const& d, std::vector<std::string> const& frames,
                     std::string const& out_path, std::ostream& out)
{
    BackendSpec spec;
    HsvThresholds th;
    try {
        spec = BackendSpec::parse(f.detector.empty() ? f.backend : f.detector);
        th = thresholds(f);
    } catch (std::invalid_argument const& e) {
        throw UsageError(e.what());
    }
    auto detector = open_backend(spec, th);
    DetectionCache cache;
    auto run_one = [&](std::string const& key, fs::path const& image, std::optional<fs::path> const& mask) {
        Frame frame{image, read_rgb(image)};
        std::optional<BinaryMask> gt;
        if (mask) {
            gt = read_mask(*mask);
        }
        cache[key] = detector->detect(frame, f.conf, gt ? &*gt : nullptr);
    };
    if (!frames.empty()) {
        for (auto const& dir : frames) {
            auto const video = load_video(dir);
            for (auto const& p : video.frames) {
                run_one(p.filename().string(), p, std::nullopt);
            }
        }
    } else {
        for (auto const& e : load_data(d).entries) {
            run_one(e.key, e.image, e.mask);
        }
    }
    write_detection_cache(cache, out_path);
    out << out_path << '\n';
    return exit_ok;
}

int cmd_render(std::string const& image, std::string const& mask, std::string const& out_path,
               std::string const& overlay_color, double alpha, std::ostream& out)
{
    Rgb color{};
    try {
        color = parse_color(overlay_color);
    } catch (std::invalid_argument const& e) {
        throw UsageError(e.what());
    }
    write_png(out_path, render_overlay(read_rgb(image), read_mask(mask), color, alpha));
    out << out_path << '\n';
    return exit_ok;
}

// Fixed request bytes for the conformance round trip; {path} is the golden
// image written to a scratch directory.
constexpr char const* golden_hello = R"(HELLO {"model_name":"","protocol_version":1})";
constexpr char const* golden_segment =
    R"(SEGMENT {"box":{"conf":1.0,"x0":1,"x1":3,"y0":1,"y1":3},"height":4,"image_path":"{path}","mode":"prompted","points":[{"label":1,"x":2,"y":2}],"want_memory":true,"width":4})";
constexpr char const* golden_detect = R"(DETECT {"conf":0.3,"image_path":"{path}"})";

int cmd_protocol_check(std::string const& backend, std::ostream& out)
{
    BackendSpec spec;
    try {
        spec = BackendSpec::parse(backend);
    } catch (std::invalid_argument const& e) {
        throw UsageError(e.what());
    }
    if (spec.kind != BackendKind::external) {
        throw UsageError("protocol-check needs an external backend (exec:CMD or tcp:HOST:PORT)");
    }

    auto const scratch = fs::temp_directory_path() / fmt::format("promptseg-check-{}", ::getpid());
    fs::create_directories(scratch);
    auto const image_path = scratch / "golden.png";
    RgbImage golden(4, 4, {20, 20, 20});
    for (int y = 1; y < 3; ++y) {
        for (int x = 1; x < 3; ++x) {
            golden.set(x, y, {255, 80, 0});
        }
    }
    write_png(image_path, golden);

    auto substitute = [&](std::string text) {
        auto const at = text.find("{path}");
        return text.replace(at, 6, image_path.string());
    };
    protocol::Segment seg{image_path.string(), 4, 4, {}, true};
    seg.prompts.box = BoundingBox{1, 1, 3, 3, 1.0};
    seg.prompts.points = {PointPrompt{2, 2, Polarity::positive}};
    protocol::Detect det{image_path.string(), 0.3};

    struct Cleanup {
        fs::path dir;
        ~Cleanup()
        {
            std::error_code ec;
            fs::remove_all(dir, ec);
        }
    } cleanup{scratch};

    auto expect_bytes = [](std::string const& actual, std::string const& golden_line) {
        if (actual != golden_line) {
            throw Error(fmt::format("protocol-check: request bytes drifted from golden\n  got:    {}\n  golden: {}",
                                    actual, golden_line));
        }
    };
    expect_bytes(protocol::format_message(protocol::Hello{protocol::version, ""}), golden_hello);
    expect_bytes(protocol::format_message(seg), substitute(golden_segment));
    expect_bytes(protocol::format_message(det), substitute(golden_detect));

    auto channel = spec.endpoint.starts_with("exec:") ? spawn_process(spec.endpoint.substr(5))
                                                      : connect_tcp(spec.endpoint.substr(4));
    channel->send_line(golden_hello);
    auto const hello = protocol::parse_message(channel->receive_line());
    auto const* h = std::get_if<protocol::Hello>(&hello);
    if (h == nullptr) {
        throw Error(fmt::format("protocol-check: expected HELLO, got {}", protocol::verb_of(hello)));
    }
    if (h->protocol_version != protocol::version) {
        throw Error(fmt::format("protocol-check: server speaks version {}, expected {}", h->protocol_version,
                                protocol::version));
    }
    out << fmt::format("HELLO ok: model_name={} protocol_version={}\n", h->model_name, h->protocol_version);

    channel->send_line(substitute(golden_segment));
    auto const mask_msg = protocol::parse_message(channel->receive_line());
    auto const* m = std::get_if<protocol::Mask>(&mask_msg);
    if (m == nullptr) {
        throw Error(fmt::format("protocol-check: expected MASK, got {}", protocol::format_message(mask_msg)));
    }
    BinaryMask decoded(1, 1);
    try {
        decoded = decode_mask(m->rle, 4, 4);
    } catch (std::invalid_argument const& e) {
        throw Error(fmt::format("protocol-check: MASK rle invalid for 4x4: {}", e.what()));
    }
    if (m->infer_ms < 0.0 || m->peak_mem_mb < 0.0) {
        throw Error("protocol-check: MASK reports negative time or memory");
    }
    out << fmt::format("SEGMENT ok: {} fire pixels, infer_ms={}, peak_mem_mb={}\n", decoded.count(), m->infer_ms,
                       m->peak_mem_mb);

    channel->send_line(substitute(golden_detect));
    auto const boxes_msg = protocol::parse_message(channel->receive_line());
    auto const* b = std::get_if<protocol::Boxes>(&boxes_msg);
    if (b == nullptr) {
        throw Error(fmt::format("protocol-check: expected BOXES, got {}", protocol::format_message(boxes_msg)));
    }
    for (auto const& box : b->boxes) {
        if (!box.valid_for(4, 4) || box.confidence < 0.3) {
            throw Error(fmt::format("protocol-check: BOXES entry ({},{},{},{}) conf {} violates the request",
                                    box.x0, box.y0, box.x1, box.y1, box.confidence));
        }
    }
    out << fmt::format("DETECT ok: {} boxes\n", b->boxes.size());
    out << "protocol-check: OK\n";
    return exit_ok;
}

} // namespace

int run(int argc, char const* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Promptable fire segmentation: prompts, metrics, backends and benchmarks", "promptseg"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);

    CommonFlags eval_flags;
    DataFlags eval_data;
    std::string eval_out = "promptseg-eval";
    std::string overlay_dir;
    std::string overlay_color = "green";
    double alpha = 0.5;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a prompting strategy on an image dataset");
    add_backend_flags(evaluate_cmd, eval_flags, "gt");
    add_data_flags(evaluate_cmd, eval_data);
    evaluate_cmd->add_option("--strategy", eval_flags.strategy, "Strategy, comma list, or 'all'");
    evaluate_cmd->add_option("--mae-scale", eval_flags.mae_scale, "Multiplier for the scaled MAE column")
        ->check(CLI::PositiveNumber);
    evaluate_cmd->add_option("--workers", eval_flags.workers, "Parallel backend connections")
        ->check(CLI::PositiveNumber);
    evaluate_cmd->add_option("--out", eval_out, "Output directory");
    evaluate_cmd->add_option("--overlay-dir", overlay_dir, "Write prediction overlays here");
    evaluate_cmd->add_option("--overlay-color", overlay_color, "Overlay colour name or R,G,B");
    evaluate_cmd->add_option("--alpha", alpha, "Overlay opacity")->check(CLI::Range(0.0, 1.0));

    CommonFlags bench_flags;
    std::vector<std::string> bench_frames;
    std::vector<std::string> bench_masks;
    int warmup = default_warmup_frames;
    std::optional<double> size_mb;
    std::string bench_out = "promptseg-bench";
    auto* bench_cmd = app.add_subcommand("bench-video", "Time detect -> prompt -> segment over video frames");
    add_backend_flags(bench_cmd, bench_flags, "detector");
    bench_cmd->add_option("--frames", bench_frames, "Frame directory (repeatable, one per video)")->required();
    bench_cmd->add_option("--masks", bench_masks, "Mask directory per --frames (optional)");
    bench_cmd->add_option("--strategy", bench_flags.strategy, "Prompting strategy");
    bench_cmd->add_option("--warmup", warmup, "Leading frames excluded from statistics")
        ->check(CLI::NonNegativeNumber);
    bench_cmd->add_option("--model-size-mb", size_mb, "Model size for the report");
    bench_cmd->add_option("--out", bench_out, "Output directory");

    std::string render_image;
    std::string render_mask;
    std::string render_out = "overlay.png";
    std::string render_color = "green";
    double render_alpha = 0.5;
    auto* render_cmd = app.add_subcommand("render", "Blend a mask over an image");
    render_cmd->add_option("--image", render_image, "RGB image")->required();
    render_cmd->add_option("--mask", render_mask, "Grayscale mask (>127 = fire)")->required();
    render_cmd->add_option("--out", render_out, "Output PNG");
    render_cmd->add_option("--overlay-color", render_color, "Overlay colour name or R,G,B");
    render_cmd->add_option("--alpha", render_alpha, "Overlay opacity")->check(CLI::Range(0.0, 1.0));

    CommonFlags cache_flags;
    DataFlags cache_data;
    std::vector<std::string> cache_frames;
    std::string cache_out = "detections.jsonl";
    auto* cache_cmd = app.add_subcommand("detect-cache", "Run a detector once and store its boxes");
    add_backend_flags(cache_cmd, cache_flags, "detector");
    add_data_flags(cache_cmd, cache_data);
    cache_cmd->add_option("--frames", cache_frames, "Frame directory (repeatable)");
    cache_cmd->add_option("--out", cache_out, "Cache file (JSON lines)");

    auto* list_cmd = app.add_subcommand("list-strategies", "Print the prompting strategy names");

    std::string check_backend;
    auto* check_cmd = app.add_subcommand("protocol-check", "Handshake with a model server and validate a round trip");
    check_cmd->add_option("--backend", check_backend, "exec:CMD | tcp:HOST:PORT")->required();

    try {
        app.parse(argc, argv);
    } catch (CLI::CallForHelp const& e) {
        (void)e;
        out << app.help();
        return exit_ok;
    } catch (CLI::ParseError const& e) {
        err << "promptseg: usage error: " << e.what() << "\n\n" << app.help();
        return exit_usage;
    }

    try {
        if (evaluate_cmd->parsed()) {
            return cmd_evaluate(app, evaluate_cmd, eval_flags, eval_data, eval_out, overlay_dir, overlay_color, alpha,
                                out);
        }
        if (bench_cmd->parsed()) {
            return cmd_bench(app, bench_cmd, bench_flags, bench_frames, bench_masks, warmup, size_mb, bench_out, out);
        }
        if (render_cmd->parsed()) {
            return cmd_render(render_image, render_mask, render_out, render_color, render_alpha, out);
        }
        if (cache_cmd->parsed()) {
            return cmd_detect_cache(cache_flags, cache_data, cache_frames, cache_out, out);
        }
        if (list_cmd->parsed()) {
            for (auto s : all_strategies) {
                out << strategy_name(s) << '\n';
            }
            return exit_ok;
        }
        if (check_cmd->parsed()) {
            return cmd_protocol_check(check_backend, out);
        }
    } catch (UsageError const& e) {
        err << "promptseg: usage error: " << e.what() << "\n\n" << app.help();
        return exit_usage;
    } catch (std::exception const& e) {
        err << "promptseg: error: " << e.what() << '\n';
        return exit_failure;
    }
    return exit_usage;
}

} // namespace promptseg::cli
