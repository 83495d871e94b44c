#include "synthetic.hpp"

#include "promptseg/cli.hpp"

#include <doctest.h>

#include <stdexcept>

#include <fstream>
#include <sstream>

using namespace promptseg;
namespace fs = std::filesystem;

namespace {

std::string const noop = PROMPTSEG_NOOP_BACKEND;

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "promptseg");
    std::vector<char const*> argv;
    for (auto const& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    int const code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(fs::path const& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace

TEST_CASE("cli usage and exit codes")
{
    auto const list = run_cli({"list-strategies"});
    CHECK(list.code == cli::exit_ok);
    CHECK(list.out == "auto\nsp\nsp+sn\nmp\nbox\nbox+sp\nbox+mp\n");

    CHECK(run_cli({}).code == cli::exit_usage);
    CHECK(run_cli({"frobnicate"}).code == cli::exit_usage);
    CHECK(run_cli({"--help"}).code == cli::exit_ok);

    auto const bad = run_cli({"evaluate", "--manifest", "x.jsonl", "--strategy", "zoom"});
    CHECK(bad.code == cli::exit_usage);
    CHECK(bad.err.find("usage error") != std::string::npos);

    CHECK(run_cli({"evaluate", "--strategy", "box"}).code == cli::exit_usage);
    CHECK(run_cli({"evaluate", "--manifest", "x.jsonl", "--backend", "sam"}).code == cli::exit_usage);
    CHECK(run_cli({"evaluate", "--manifest", "x.jsonl", "--conf", "2"}).code == cli::exit_usage);

    auto const missing = run_cli({"evaluate", "--manifest", "/nonexistent/m.jsonl"});
    CHECK(missing.code == cli::exit_failure);
    CHECK(missing.err.find("promptseg: error:") == 0);
}

TEST_CASE("cli evaluate writes reports")
{
    synthetic::TempDir dir;
    auto const manifest = synthetic::write_dataset(dir / "data", 4, 21, 40, 30);
    auto const out_dir = dir / "out";
    auto const r = run_cli({"evaluate", "--manifest", manifest.string(), "--strategy", "box,sp", "--out",
                            out_dir.string(), "--overlay-dir", (dir / "ov").string(), "--workers", "2"});
    INFO(r.err);
    REQUIRE(r.code == cli::exit_ok);
    auto const csv = slurp(out_dir / "eval.csv");
    CHECK(csv.rfind("strategy,backend,n,pa,ma,miou,fwiou,dice,mae_raw,mae_scaled\nbox,oracle,4,1.000000,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    CHECK(fs::exists(out_dir / "eval.md"));
    CHECK(fs::exists(out_dir / "run_config.toml"));
    auto const per_image = slurp(out_dir / "per_image.csv");
    CHECK(std::count(per_image.begin(), per_image.end(), '\n') == 1 + 8);
    CHECK(fs::exists(dir / "ov" / "img_000_box.png"));
    auto const run_config = slurp(out_dir / "run_config.toml");
    for (auto const* key : {"backend", "box-source", "conf", "mae-scale", "workers", "hsv-h"}) {
        CHECK(run_config.find(key) != std::string::npos);
    }

    SUBCASE("explicit gt box source on a .txt manifest")
    {
        fs::copy_file(manifest, dir / "data" / "m.txt");
        auto const e = run_cli({"evaluate", "--manifest", (dir / "data" / "m.txt").string(), "--strategy", "box",
                                "--backend", "oracle", "--box-source", "gt:dilate=0", "--out", (dir / "o5").string()});
        CHECK(e.code == cli::exit_ok);
        CHECK(slurp(dir / "o5" / "eval.csv").find("box,oracle,4,1.000000,1.000000,1.000000") != std::string::npos);
    }

    SUBCASE("images/masks pairing gives the same numbers")
    {
        auto const again = run_cli({"evaluate", "--images", (dir / "data/images").string(), "--masks",
                                    (dir / "data/masks").string(), "--strategy", "box,sp", "--out",
                                    (dir / "out2").string()});
        REQUIRE(again.code == cli::exit_ok);
        CHECK(slurp(dir / "out2" / "eval.csv") == csv);
    }
    SUBCASE("detect-cache then file box source")
    {
        auto const cache = dir / "boxes.jsonl";
        auto const c = run_cli({"detect-cache", "--manifest", manifest.string(), "--detector", "hsv", "--out",
                                cache.string()});
        REQUIRE(c.code == cli::exit_ok);
        auto const e = run_cli({"evaluate", "--manifest", manifest.string(), "--box-source", "file:" + cache.string(),
                                "--out", (dir / "out3").string()});
        INFO(e.err);
        CHECK(e.code == cli::exit_ok);
    }
    SUBCASE("all strategies")
    {
        auto const all = run_cli({"evaluate", "--manifest", manifest.string(), "--strategy", "all", "--out",
                                  (dir / "out4").string()});
        REQUIRE(all.code == cli::exit_ok);
        auto const text = slurp(dir / "out4" / "eval.csv");
        CHECK(std::count(text.begin(), text.end(), '\n') == 8);
    }
}

TEST_CASE("cli bench-video, render and protocol-check")
{
    synthetic::TempDir dir;
    synthetic::write_video(dir / "v1", dir / "m1", 5, 4);

    auto const b = run_cli({"bench-video", "--frames", (dir / "v1").string(), "--masks", (dir / "m1").string(),
                            "--warmup", "1", "--model-size-mb", "10", "--out", (dir / "bench").string()});
    INFO(b.err);
    REQUIRE(b.code == cli::exit_ok);
    auto const csv = slurp(dir / "bench" / "bench.csv");
    CHECK(csv.find("oracle,v1,") != std::string::npos);
    CHECK(csv.find("oracle,overall,") != std::string::npos);
    CHECK(slurp(dir / "bench" / "bench.md").find("| 10.00 |") != std::string::npos);
    CHECK(run_cli({"bench-video", "--frames", (dir / "v1").string(), "--warmup", "5"}).code == cli::exit_usage);

    auto const r = run_cli({"render", "--image", (dir / "v1/frame_0.png").string(), "--mask",
                            (dir / "m1/frame_0.png").string(), "--out", (dir / "o.png").string()});
    CHECK(r.code == cli::exit_ok);
    CHECK(fs::exists(dir / "o.png"));

    auto const ok = run_cli({"protocol-check", "--backend", "exec:" + noop + " --fill-box --boxes 1,1,3,3,0.9"});
    INFO(ok.err);
    CHECK(ok.code == cli::exit_ok);
    CHECK(ok.out.find("SEGMENT ok: 4 fire pixels") != std::string::npos);
    CHECK(ok.out.find("protocol-check: OK") != std::string::npos);

    CHECK(run_cli({"protocol-check", "--backend", "oracle"}).code == cli::exit_usage);
    CHECK(run_cli({"protocol-check", "--backend", "exec:" + noop + " --protocol-version 2"}).code ==
          cli::exit_failure);
    CHECK(run_cli({"protocol-check", "--backend", "exec:" + noop + " --boxes 0,0,9,9,0.9"}).code ==
          cli::exit_failure);
}
