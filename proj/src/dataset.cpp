#include "promptseg/dataset.hpp"

#include "promptseg/error.hpp"
#include "promptseg/image_io.hpp"

#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>

namespace promptseg {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

void check_dimensions(DatasetEntry const& e, std::string const& where)
{
    if (!e.mask) {
        return;
    }
    auto const img = read_gray(e.image);
    auto const mask = read_gray(*e.mask);
    if (img.width() != mask.width() || img.height() != mask.height()) {
        throw DatasetError(fmt::format("{}: image '{}' is {}x{} but mask '{}' is {}x{}", where, e.image.string(),
                                       img.width(), img.height(), e.mask->string(), mask.width(), mask.height()));
    }
}

// Files of a directory keyed by stem, sorted; duplicate stems are an error.
std::map<std::string, fs::path> images_by_stem(fs::path const& dir)
{
    if (!fs::is_directory(dir)) {
        throw DatasetError(fmt::format("'{}' is not a directory", dir.string()));
    }
    std::map<std::string, fs::path> out;
    for (auto const& de : fs::directory_iterator(dir)) {
        if (!de.is_regular_file() || !is_image_file(de.path())) {
            continue;
        }
        auto const stem = de.path().stem().string();
        auto [it, inserted] = out.emplace(stem, de.path());
        if (!inserted) {
            auto const a = std::min(it->second.filename().string(), de.path().filename().string());
            auto const b = std::max(it->second.filename().string(), de.path().filename().string());
            throw DatasetError(fmt::format("ambiguous stem '{}' in '{}': {} and {}", stem, dir.string(), a, b));
        }
    }
    return out;
}

} // namespace

bool is_image_file(fs::path const& file)
{
    auto const ext = lower(file.extension().string());
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp";
}

std::optional<int> frame_index(fs::path const& file)
{
    auto const stem = file.stem().string();
    auto const first = std::find_if(stem.begin(), stem.end(), [](unsigned char c) { return std::isdigit(c); });
    if (first == stem.end()) {
        return std::nullopt;
    }
    auto const last = std::find_if(first, stem.end(), [](unsigned char c) { return !std::isdigit(c); });
    int value = 0;
    auto const [ptr, ec] = std::from_chars(&*first, &*first + (last - first), value);
    if (ec != std::errc{}) {
        return std::nullopt;
    }
    return value;
}

DatasetManifest load_manifest(fs::path const& path, LoadOptions const& options)
{
    std::ifstream in(path);
    if (!in) {
        throw DatasetError(fmt::format("cannot open manifest '{}'", path.string()));
    }
    DatasetManifest manifest;
    manifest.root = path.parent_path();
    auto resolve = [&](std::string const& p) { return fs::path(p).is_absolute() ? fs::path(p) : manifest.root / p; };

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto const start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') {
            continue;
        }
        auto const where = fmt::format("{}:{}", path.string(), line_no);
        DatasetEntry e;
        try {
            auto const j = json::parse(line);
            e.key = j.at("image").get<std::string>();
            e.image = resolve(e.key);
            if (j.contains("mask") && !j.at("mask").is_null()) {
                e.mask = resolve(j.at("mask").get<std::string>());
            }
            e.split = j.value("split", std::string{});
        } catch (json::exception const& ex) {
            throw DatasetError(fmt::format("{}: malformed row: {}", where, ex.what()));
        }
        if (!fs::is_regular_file(e.image)) {
            throw DatasetError(fmt::format("{}: image '{}' does not exist", where, e.image.string()));
        }
        if (e.mask && !fs::is_regular_file(*e.mask)) {
            throw DatasetError(fmt::format("{}: mask '{}' does not exist", where, e.mask->string()));
        }
        if (options.verify_dimensions) {
            check_dimensions(e, where);
        }
        manifest.entries.push_back(std::move(e));
    }
    return manifest;
}

void write_manifest(DatasetManifest const& manifest, fs::path const& path)
{
    std::ofstream out(path);
    if (!out) {
        throw DatasetError(fmt::format("cannot write manifest '{}'", path.string()));
    }
    for (auto const& e : manifest.entries) {
        json j{{"image", e.image.string()}, {"split", e.split}};
        if (e.mask) {
            j["mask"] = e.mask->string();
        }
        out << j.dump() << '\n';
    }
}

DatasetManifest pair_by_stem(fs::path const& images_dir, fs::path const& masks_dir, LoadOptions const& options)
{
    auto const images = images_by_stem(images_dir);
    auto const masks = images_by_stem(masks_dir);

    DatasetManifest manifest;
    manifest.root = images_dir;
    for (auto const& [stem, image] : images) {
        auto const m = masks.find(stem);
        if (m == masks.end()) {
            ++manifest.skipped;
            continue;
        }
        DatasetEntry e{image.filename().string(), image, m->second, {}};
        if (options.verify_dimensions) {
            check_dimensions(e, e.key);
        }
        manifest.entries.push_back(std::move(e));
    }
    if (manifest.entries.empty()) {
        throw DatasetError(fmt::format("no image in '{}' has a mask with the same stem in '{}'", images_dir.string(),
                                       masks_dir.string()));
    }
    if (manifest.skipped > 0) {
        spdlog::warn("{} image(s) in '{}' have no matching mask and were skipped", manifest.skipped,
                     images_dir.string());
    }
    return manifest;
}

namespace {

std::map<int, fs::path> frames_by_index(fs::path const& dir)
{
    if (!fs::is_directory(dir)) {
        throw DatasetError(fmt::format("'{}' is not a directory", dir.string()));
    }
    std::map<int, fs::path> out;
    std::size_t unindexed = 0;
    for (auto const& de : fs::directory_iterator(dir)) {
        if (!de.is_regular_file() || !is_image_file(de.path())) {
            continue;
        }
        auto const idx = frame_index(de.path());
        if (!idx) {
            ++unindexed;
            continue;
        }
        auto [it, inserted] = out.emplace(*idx, de.path());
        if (!inserted) {
            auto const a = std::min(it->second.filename().string(), de.path().filename().string());
            auto const b = std::max(it->second.filename().string(), de.path().filename().string());
            throw DatasetError(fmt::format("duplicate frame index {} in '{}': {} and {}", *idx, dir.string(), a, b));
        }
    }
    if (unindexed > 0) {
        spdlog::warn("{} file(s) in '{}' carry no frame index and were skipped", unindexed, dir.string());
    }
    return out;
}

} // namespace

VideoSequence load_video(fs::path const& frames_dir, std::optional<fs::path> const& masks_dir)
{
    auto const frames = frames_by_index(frames_dir);
    if (frames.empty()) {
        throw DatasetError(fmt::format("no indexed frames in '{}'", frames_dir.string()));
    }
    VideoSequence video;
    auto name_source = frames_dir.filename().empty() ? frames_dir.parent_path() : frames_dir;
    video.name = name_source.filename().string();
    for (auto const& [idx, path] : frames) {
        video.indices.push_back(idx);
        video.frames.push_back(path);
    }
    if (masks_dir) {
        auto const masks = frames_by_index(*masks_dir);
        for (int idx : video.indices) {
            auto const it = masks.find(idx);
            video.masks.push_back(it == masks.end() ? std::nullopt : std::optional<fs::path>(it->second));
        }
    }
    return video;
}

} // namespace promptseg
