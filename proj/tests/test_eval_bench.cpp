#include "synthetic.hpp"

#include "promptseg/bench.hpp"
#include "promptseg/error.hpp"
#include "promptseg/eval.hpp"
#include "promptseg/overlay.hpp"
#include "promptseg/report.hpp"

#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <fstream>
#include <mutex>
#include <sstream>

using namespace promptseg;
namespace fs = std::filesystem;

namespace {

std::string const noop = PROMPTSEG_NOOP_BACKEND;

std::string slurp(fs::path const& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::size_t line_count(std::string const& s)
{
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

EvalConfig oracle_config(Strategy s)
{
    EvalConfig c;
    c.strategy = s;
    c.backend = BackendSpec::parse("oracle");
    c.box_source = GroundTruthBoxes{};
    return c;
}

} // namespace

TEST_CASE("box source parsing")
{
    auto const det = BackendSpec::parse("hsv");
    CHECK(std::holds_alternative<DetectorBoxes>(parse_box_source("detector", det)));
    auto const gt = std::get<GroundTruthBoxes>(parse_box_source("gt:dilate=2,min_area=5", det));
    CHECK(gt.dilate == 2);
    CHECK(gt.min_area == 5);
    CHECK(std::get<GroundTruthBoxes>(parse_box_source("gt", det)).dilate == 0);
    CHECK_THROWS_AS(parse_box_source("gt:dilate=x", det), std::invalid_argument);
    CHECK_THROWS_AS(parse_box_source("gt:radius=1", det), std::invalid_argument);
    CHECK_THROWS_AS(parse_box_source("yolo", det), std::invalid_argument);
    CHECK(describe(parse_box_source("gt:dilate=2", det)).find("gt") == 0);
}

TEST_CASE("detection cache round trip")
{
    synthetic::TempDir dir;
    DetectionCache cache{{"a.png", {{1, 2, 3, 4, 0.5}}}, {"b.png", {}}};
    write_detection_cache(cache, dir / "c.jsonl");
    CHECK(read_detection_cache(dir / "c.jsonl") == cache);
    std::ofstream(dir / "bad.jsonl") << "{\"key\":\"a\"}\n";
    CHECK_THROWS_AS(read_detection_cache(dir / "bad.jsonl"), DatasetError);
}

TEST_CASE("config validation")
{
    auto c = oracle_config(Strategy::box);
    CHECK_NOTHROW(c.validate());
    c.workers = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.workers = 1;
    c.conf_threshold = 1.5;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.conf_threshold = 0.3;
    c.mae_scale = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("evaluate on a synthetic dataset")
{
    synthetic::TempDir dir;
    auto const data = load_manifest(synthetic::write_dataset(dir.path(), 8, 3, 48, 32, false, synthetic::Shape::rectangle));

    SUBCASE("oracle with tight boxes is exact")
    {
        auto const r = evaluate(oracle_config(Strategy::box), data);
        CHECK(r.count() == 8);
        CHECK(r.mean.miou == 1.0);
        CHECK(r.mean.dice == 1.0);
        CHECK(r.mean.mae_raw == 0.0);
        CHECK(r.images[0].key == "images/img_000.png");
        CHECK(r.model == "oracle");
    }
    SUBCASE("a single centroid point recovers a lone rectangle")
    {
        auto const lone = load_manifest(
            synthetic::write_dataset(dir / "lone", 6, 8, 48, 32, false, synthetic::Shape::rectangle, 1));
        auto const r = evaluate(oracle_config(Strategy::sp), lone);
        CHECK(r.mean.dice == 1.0);
        CHECK(r.mean.mae_raw == 0.0);
    }
    SUBCASE("hsv backend matches the painted colours")
    {
        auto c = oracle_config(Strategy::box);
        c.backend = BackendSpec::parse("hsv");
        c.box_source = DetectorBoxes{c.backend};
        CHECK(evaluate(c, data).mean.miou == doctest::Approx(1.0));
    }
    SUBCASE("worker count does not change the result")
    {
        auto c = oracle_config(Strategy::mp);
        auto const one = evaluate(c, data);
        c.workers = 3;
        auto const three = evaluate(c, data);
        CHECK(render_eval(std::span(&one, 1), ReportFormat::csv) == render_eval(std::span(&three, 1), ReportFormat::csv));
        CHECK(render_per_image(one) == render_per_image(three));
    }
    SUBCASE("prediction sink sees every image")
    {
        std::mutex mu;
        std::vector<std::string> keys;
        (void)evaluate(oracle_config(Strategy::box), data,
                       [&](DatasetEntry const& e, RgbImage const&, BinaryMask const&) {
                           std::lock_guard lock(mu);
                           keys.push_back(e.key);
                       });
        CHECK(keys.size() == 8);
    }
    SUBCASE("cached boxes must cover every key")
    {
        auto c = oracle_config(Strategy::box);
        c.box_source = CachedBoxes{dir / "c.jsonl", {}};
        CHECK_THROWS_AS(evaluate(c, data), DatasetError);
    }
    SUBCASE("backend failure flushes completed rows")
    {
        auto c = oracle_config(Strategy::box);
        c.backend = BackendSpec::parse("exec:" + noop + " --boxes 0,0,4,4,0.9 --fail-after 3");
        c.box_source = DetectorBoxes{c.backend};
        c.partial_results = dir / "partial.csv";
        CHECK_THROWS_AS(evaluate(c, data), BackendError);
        auto const text = slurp(dir / "partial.csv");
        CHECK(text.rfind("key,boxes,prompt_sets,", 0) == 0);
        CHECK(line_count(text) == 1 + 3);
    }
}

TEST_CASE("prediction merges prompt sets")
{
    auto backend = open_backend(BackendSpec::parse("oracle"));
    BinaryMask gt(8, 8);
    gt.set(1, 1);
    gt.set(6, 6);
    Frame const frame{{}, RgbImage(8, 8)};
    std::vector<PromptSet> sets(2);
    sets[0].box = BoundingBox{0, 0, 3, 3, 1.0};
    sets[1].box = BoundingBox{5, 5, 8, 8, 1.0};
    CHECK(predict(*backend, frame, sets, &gt).mask == gt);
    CHECK(predict(*backend, frame, {}, &gt).mask.count() == 0);
}

TEST_CASE("video profiling")
{
    synthetic::TempDir dir;
    synthetic::write_video(dir / "clip", dir / "clip_masks", 6, 11);
    auto const video = load_video(dir / "clip", dir / "clip_masks");

    auto c = oracle_config(Strategy::box);
    c.backend = BackendSpec::parse("exec:" + noop + " --boxes 2,2,10,10,0.9 --peak-mem 42");
    c.box_source = DetectorBoxes{c.backend};

    auto const r = profile_video(c, video, 2);
    REQUIRE(r.videos.size() == 1);
    CHECK(r.videos[0].frames.size() == 4);
    CHECK(r.videos[0].frames[0].index == 2);
    CHECK(r.videos[0].frames[0].boxes == 1);
    CHECK(r.model == "noop");
    CHECK(r.backend_peak_mb == 42.0);
    auto const& v = r.videos[0];
    double const ratio = v.fps() * v.mean_ms() / 1000.0;
    CHECK(ratio <= 1.0);
    CHECK(ratio > 0.5);
    for (auto const& f : v.frames) {
        CHECK(f.end_to_end_ms >= f.detect_ms + f.segment_ms);
    }

    CHECK(profile_video(c, video, 5).videos[0].frames.size() == 1);
    CHECK_THROWS_AS(profile_video(c, video, 6), std::invalid_argument);

    auto const merged = merge_reports({r, r});
    CHECK(merged.videos.size() == 2);
    CHECK(merged.frame_count() == 8);

    SUBCASE("rendering")
    {
        auto const csv = render_bench(merged, ReportFormat::csv);
        CHECK(csv.rfind("model,video,mean_ms,fps,harness_peak_mb,backend_peak_mb\n", 0) == 0);
        CHECK(line_count(csv) == 1 + 2 + 1);
        CHECK(csv.find("\nnoop,overall,") != std::string::npos);
        auto const md = render_bench(merged, ReportFormat::markdown);
        CHECK(md.find("| box + noop | - |") != std::string::npos);
        CHECK(line_count(render_frames(merged)) == 1 + 8);

        emit_report(merged, ReportFormat::csv, dir / "a.csv");
        emit_report(merged, ReportFormat::csv, dir / "b.csv");
        CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
        CHECK(slurp(dir / "a.csv") == csv);
    }
    SUBCASE("oracle needs masks")
    {
        auto const bare = load_video(dir / "clip");
        CHECK_THROWS_AS(profile_video(oracle_config(Strategy::box), bare, 1), DatasetError);
    }
}

TEST_CASE("eval report rendering")
{
    EvalReport a;
    a.strategy = "box";
    a.model = "oracle";
    a.images.resize(3);
    a.mean = MetricBundle{1, 1, 1, 1, 1, 0, 0};
    EvalReport b = a;
    b.strategy = "sp";
    b.mean = MetricBundle{0.5, 0.25, 0.125, 0.75, 0.2, 0.5, 127.5};
    std::vector<EvalReport> const reports{a, b};
    auto const csv = render_eval(reports, ReportFormat::csv);
    CHECK(csv == "strategy,backend,n,pa,ma,miou,fwiou,dice,mae_raw,mae_scaled\n"
                 "box,oracle,3,1.000000,1.000000,1.000000,1.000000,1.000000,0.000000,0.000000\n"
                 "sp,oracle,3,0.500000,0.250000,0.125000,0.750000,0.200000,0.500000,127.500000\n");
    auto const md = render_eval(reports, ReportFormat::markdown);
    CHECK(line_count(md) == 4);
    CHECK(md.find("| sp | oracle | 3 | 0.125 | 0.200 | 127.50 | 0.500 | 0.250 | 0.750 |") != std::string::npos);
    CHECK(parse_report_format("md") == ReportFormat::markdown);
    CHECK_THROWS_AS(parse_report_format("xml"), std::invalid_argument);
}

TEST_CASE("overlay blending")
{
    RgbImage img(2, 1, {0, 0, 0});
    img.set(1, 0, {200, 100, 50});
    BinaryMask m(2, 1, {1, 0});
    auto const out = render_overlay(img, m);
    CHECK(out.at(0, 0) == Rgb{0, 127, 0});
    CHECK(out.at(1, 0) == Rgb{200, 100, 50});
    CHECK(render_overlay(img, m, overlay_red, 1.0).at(0, 0) == Rgb{255, 0, 0});
    CHECK(render_overlay(img, m, overlay_red, 0.0).at(0, 0) == Rgb{0, 0, 0});
    CHECK_THROWS_AS(render_overlay(img, m, overlay_red, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(render_overlay(img, BinaryMask(3, 1)), DimensionMismatch);
    CHECK(parse_color("10,20,30") == Rgb{10, 20, 30});
    CHECK(parse_color("red") == overlay_red);
    CHECK_THROWS_AS(parse_color("300,0,0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_color("mauve"), std::invalid_argument);
}

TEST_CASE("report examples")
{
    VideoTiming v;
    v.name = "v";
    v.frames.resize(10);
    for (auto& f : v.frames) {
        f.end_to_end_ms = 200.0;
    }
    v.wall_seconds = 2.0;
    CHECK(v.fps() == doctest::Approx(5.0));
    CHECK(v.mean_ms() == doctest::Approx(200.0));

    BenchReport b;
    b.model = "noop";
    b.strategy = "box";
    for (int i = 0; i < 5; ++i) {
        v.name = fmt::format("v{}", i);
        b.videos.push_back(v);
    }
    CHECK(line_count(render_bench(b, ReportFormat::csv)) == 1 + 5 + 1);
    CHECK(b.fps() == doctest::Approx(5.0));

    EvalReport one;
    one.strategy = "box";
    one.model = "oracle";
    one.images.resize(1);
    CHECK(line_count(render_eval(std::span(&one, 1), ReportFormat::csv)) == 2);
    CHECK(line_count(render_per_image(one)) == 2);

    synthetic::TempDir dir;
    std::vector<EvalReport> const reports{one};
    emit_report(reports, ReportFormat::markdown, dir / "a.md");
    emit_report(reports, ReportFormat::markdown, dir / "b.md");
    CHECK(slurp(dir / "a.md") == slurp(dir / "b.md"));
    CHECK_THROWS_AS(emit_report(reports, ReportFormat::csv, dir / "missing" / "x.csv"), Error);
}

TEST_CASE("overlay edge examples")
{
    RgbImage img(3, 2, {10, 20, 30});
    img.set(2, 1, {200, 0, 90});
    auto const same = render_overlay(img, BinaryMask(3, 2));
    CHECK(std::ranges::equal(same.pixels(), img.pixels()));
    BinaryMask full(3, 2, std::vector<std::uint8_t>(6, 1));
    auto const solid = render_overlay(img, full, Rgb{1, 2, 3}, 1.0);
    for (auto const& p : solid.pixels()) {
        CHECK(p == Rgb{1, 2, 3});
    }
}
