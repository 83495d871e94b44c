#include "oracle.hpp"

#include "promptseg/hsv.hpp"
#include "promptseg/prompts.hpp"

#include <doctest.h>

#include <stdexcept>

#include <random>

using namespace promptseg;

TEST_CASE("rgb_to_hsv")
{
    auto const red = rgb_to_hsv(255, 0, 0);
    CHECK(red.h == 0.0);
    CHECK(red.s == 1.0);
    CHECK(red.v == 1.0);

    auto const black = rgb_to_hsv(0, 0, 0);
    CHECK(black.h == 0.0);
    CHECK(black.s == 0.0);
    CHECK(black.v == 0.0);

    // Orange: max = R, h = 60 * (165 - 0) / 255.
    auto const orange = rgb_to_hsv(255, 165, 0);
    CHECK(orange.h == doctest::Approx(60.0 * 165.0 / 255.0));
    CHECK(orange.h == doctest::Approx(38.82).epsilon(1e-3));
    CHECK(orange.s == 1.0);
    CHECK(orange.v == 1.0);

    CHECK(rgb_to_hsv(0, 0, 255).h == doctest::Approx(240.0));
    CHECK(rgb_to_hsv(0, 255, 0).h == doctest::Approx(120.0));
    CHECK(rgb_to_hsv(255, 0, 128).h == doctest::Approx(360.0 - 60.0 * 128.0 / 255.0));
    CHECK(rgb_to_hsv(128, 128, 128).s == 0.0);

    std::mt19937 rng(3);
    std::uniform_int_distribution<int> byte(0, 255);
    for (int i = 0; i < 1000; ++i) {
        auto const hsv = rgb_to_hsv(byte(rng), byte(rng), byte(rng));
        CHECK(hsv.h >= 0.0);
        CHECK(hsv.h < 360.0);
        CHECK(hsv.s >= 0.0);
        CHECK(hsv.s <= 1.0);
        CHECK(hsv.v >= 0.0);
        CHECK(hsv.v <= 1.0);
    }
}

TEST_CASE("is_fire_colored with default thresholds")
{
    HsvThresholds const th;
    CHECK(is_fire_colored({255, 0, 0}, th));
    CHECK_FALSE(is_fire_colored({0, 0, 255}, th));
    // v = 64 / 255 = 0.25 < 0.5
    CHECK_FALSE(is_fire_colored({64, 0, 0}, th));
    CHECK(is_fire_colored({255, 165, 0}, th));
    CHECK_FALSE(is_fire_colored({200, 200, 200}, th));
    CHECK(is_fire_colored({255, 0, 60}, th)); // hue ~346
}

TEST_CASE("HsvThresholds validation and range parsing")
{
    HsvThresholds th;
    CHECK_NOTHROW(th.validate());
    th.saturation = {0.8, 0.2};
    CHECK_THROWS_AS(th.validate(), std::invalid_argument);
    th = {};
    th.hue = {{0, 400}};
    CHECK_THROWS_AS(th.validate(), std::invalid_argument);

    auto const r = parse_ranges("0-65,340-360");
    REQUIRE(r.size() == 2);
    CHECK(r[1] == Range{340, 360});
    CHECK(format_ranges(r) == "0-65,340-360");
    CHECK(parse_ranges("0.2-1").front() == Range{0.2, 1.0});
    CHECK_THROWS_AS(parse_ranges("abc"), std::invalid_argument);
    CHECK_THROWS_AS(parse_ranges("5"), std::invalid_argument);
}

TEST_CASE("centroid_point")
{
    CHECK(centroid_point({2, 2, 6, 8}) == PointPrompt{4, 5, Polarity::positive});
    CHECK(centroid_point({0, 0, 1, 1}) == PointPrompt{0, 0, Polarity::positive});
    CHECK(centroid_point({10, 20, 15, 25}) == PointPrompt{12, 22, Polarity::positive});
}

TEST_CASE("grid_points")
{
    BoundingBox const box{0, 0, 8, 8};
    auto const cand = grid_candidates(box);
    std::vector<int> xs;
    std::vector<int> ys;
    for (auto const& p : cand) {
        xs.push_back(p.x);
        ys.push_back(p.y);
    }
    CHECK(xs == std::vector<int>{2, 4, 6, 2, 4, 6, 2, 4, 6});
    CHECK(ys == std::vector<int>{2, 2, 2, 4, 4, 4, 6, 6, 6});

    SUBCASE("all red keeps all nine")
    {
        auto const pts = grid_points(box, RgbImage(8, 8, {255, 0, 0}), {});
        CHECK(pts.size() == 9);
        CHECK(std::equal(pts.begin(), pts.end(), cand.begin()));
    }
    SUBCASE("all blue falls back to the centroid")
    {
        auto const pts = grid_points(box, RgbImage(8, 8, {0, 0, 255}), {});
        REQUIRE(pts.size() == 1);
        CHECK(pts.front() == centroid_point(box));
    }
    SUBCASE("partial colour keeps only fire pixels")
    {
        RgbImage img(8, 8, {0, 0, 255});
        img.set(2, 2, {255, 100, 0});
        img.set(6, 6, {255, 100, 0});
        auto const pts = grid_points(box, img, {});
        REQUIRE(pts.size() == 2);
        CHECK(pts[0] == PointPrompt{2, 2, Polarity::positive});
        CHECK(pts[1] == PointPrompt{6, 6, Polarity::positive});
    }
    SUBCASE("one pixel box")
    {
        auto const pts = grid_points({3, 3, 4, 4}, RgbImage(8, 8, {255, 0, 0}), {});
        CHECK(pts.size() == 9);
        for (auto const& p : pts) {
            CHECK(p == PointPrompt{3, 3, Polarity::positive});
        }
    }
    CHECK_THROWS_AS(grid_points({0, 0, 9, 8}, RgbImage(8, 8), {}), std::invalid_argument);
}

TEST_CASE("negative_point")
{
    SUBCASE("single centred box picks the top-left corner candidate")
    {
        auto const p = negative_point({{40, 40, 60, 60}}, 100, 100);
        REQUIRE(p);
        CHECK(*p == PointPrompt{3, 3, Polarity::negative});
    }
    SUBCASE("no boxes gives the first grid point")
    {
        auto const p = negative_point({}, 100, 100);
        REQUIRE(p);
        CHECK(*p == PointPrompt{3, 3, Polarity::negative});
    }
    SUBCASE("box covering the image gives none")
    {
        CHECK_FALSE(negative_point({{0, 0, 100, 100}}, 100, 100));
    }
    SUBCASE("matches the floating-point enumeration oracle")
    {
        std::mt19937 rng(11);
        std::uniform_int_distribution<int> dim(1, 120);
        for (int trial = 0; trial < 300; ++trial) {
            int const w = dim(rng);
            int const h = dim(rng);
            std::vector<BoundingBox> boxes;
            std::uniform_int_distribution<int> nbox(0, 4);
            for (int k = nbox(rng); k > 0; --k) {
                std::uniform_int_distribution<int> xs(0, w - 1);
                std::uniform_int_distribution<int> ys(0, h - 1);
                int const x0 = xs(rng);
                int const y0 = ys(rng);
                std::uniform_int_distribution<int> bw(1, w - x0);
                std::uniform_int_distribution<int> bh(1, h - y0);
                boxes.push_back({x0, y0, x0 + bw(rng), y0 + bh(rng), 1.0});
            }
            auto const got = negative_point(boxes, w, h);
            auto const want = oracle::negative_point(boxes, w, h);
            CHECK(got == want);
            if (got) {
                for (auto const& b : boxes) {
                    CHECK_FALSE(b.contains(got->x, got->y));
                }
            }
        }
    }
}

TEST_CASE("build_prompts")
{
    RgbImage const image(100, 100, {255, 0, 0});
    std::vector<BoundingBox> const two{{10, 10, 30, 30, 0.9}, {50, 50, 70, 90, 0.8}};

    SUBCASE("box strategy: one set per box, no points")
    {
        auto const sets = build_prompts(Strategy::box, two, image);
        REQUIRE(sets.size() == 2);
        for (std::size_t i = 0; i < 2; ++i) {
            CHECK(sets[i].box == two[i]);
            CHECK(sets[i].points.empty());
        }
    }
    SUBCASE("sp+sn appends the shared negative point")
    {
        auto const sets = build_prompts(Strategy::sp_sn, {{40, 40, 60, 60, 1.0}}, image);
        REQUIRE(sets.size() == 1);
        CHECK(sets[0].points ==
              std::vector<PointPrompt>{{50, 50, Polarity::positive}, {3, 3, Polarity::negative}});
        CHECK_FALSE(sets[0].box);
    }
    SUBCASE("auto ignores the boxes")
    {
        auto const sets = build_prompts(Strategy::automatic, {two[0], two[1], two[0]}, image);
        REQUIRE(sets.size() == 1);
        CHECK(sets[0].mode == PromptMode::automatic);
        CHECK_FALSE(sets[0].box);
        CHECK(sets[0].points.empty());
    }
    SUBCASE("prompted strategy without boxes yields nothing")
    {
        CHECK(build_prompts(Strategy::sp, {}, image).empty());
        CHECK(build_prompts(Strategy::box_mp, {}, image).empty());
    }
    SUBCASE("hybrids")
    {
        auto const sp = build_prompts(Strategy::box_sp, two, image);
        CHECK(sp[1].box == two[1]);
        CHECK(sp[1].points == std::vector<PointPrompt>{centroid_point(two[1])});
        auto const mp = build_prompts(Strategy::box_mp, two, image);
        CHECK(mp[0].points.size() == 9);
        CHECK(build_prompts(Strategy::mp, two, image)[0].points == mp[0].points);
    }
    SUBCASE("invalid box")
    {
        CHECK_THROWS_AS(build_prompts(Strategy::box, {{0, 0, 101, 10, 1.0}}, image), std::invalid_argument);
    }
}

TEST_CASE("strategy names")
{
    for (auto s : all_strategies) {
        CHECK(parse_strategy(strategy_name(s)) == s);
    }
    CHECK(parse_strategy("sp_sn") == Strategy::sp_sn);
    CHECK(parse_strategy("BOX+MP") == Strategy::box_mp);
    CHECK_THROWS_AS(parse_strategy("boxes"), std::invalid_argument);
    CHECK(strategy_name(Strategy::box_sp) == "box+sp");
}

TEST_CASE("prompt set serialization")
{
    PromptSet set;
    set.box = BoundingBox{1, 2, 3, 4, 0.5};
    set.points = {{2, 3, Polarity::positive}, {0, 0, Polarity::negative}};
    auto const text = serialize(set);
    CHECK(text ==
          R"({"box":{"conf":0.5,"x0":1,"x1":3,"y0":2,"y1":4},"mode":"prompted","points":[{"label":1,"x":2,"y":3},{"label":0,"x":0,"y":0}]})");
    CHECK(parse_prompt_set(text) == set);
    CHECK(serialize(PromptSet::automatic()) == R"({"mode":"auto","points":[]})");
    CHECK_THROWS_AS(parse_prompt_set(R"({"mode":"auto","points":[{"label":1,"x":0,"y":0}]})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_prompt_set("{"), std::invalid_argument);
}
