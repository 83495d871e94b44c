#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace promptseg {

struct DatasetEntry {
    /// Stable identifier used in reports and detection caches: the image path
    /// as written in the manifest (or the file name for directory pairing).
    std::string key;
    std::filesystem::path image;
    std::optional<std::filesystem::path> mask;
    std::string split;
};

struct DatasetManifest {
    std::filesystem::path root;
    std::vector<DatasetEntry> entries;
    /// Images dropped during pairing because no mask matched.
    std::size_t skipped = 0;
};

struct LoadOptions {
    /// Decode every image/mask pair and reject mismatched shapes.
    bool verify_dimensions = true;
};

/// JSON-lines manifest, one {"image": ..., "mask": ..., "split": ...} object
/// per line; '#' comments and blank lines are ignored. Relative paths resolve
/// against the manifest's directory. Throws DatasetError naming the line.
DatasetManifest load_manifest(std::filesystem::path const& path, LoadOptions const& options = {});

void write_manifest(DatasetManifest const& manifest, std::filesystem::path const& path);

/// Pairs images and masks that share a file stem. Throws DatasetError when no
/// pair is found or a stem is ambiguous within one directory.
DatasetManifest pair_by_stem(std::filesystem::path const& images_dir, std::filesystem::path const& masks_dir,
                             LoadOptions const& options = {});

struct VideoSequence {
    std::string name;
    std::vector<int> indices;
    std::vector<std::filesystem::path> frames;
    /// Empty, or one optional mask per frame.
    std::vector<std::optional<std::filesystem::path>> masks;
    std::optional<double> fps_hint;

    std::size_t size() const { return frames.size(); }
};

/// Frames ordered by the first integer in each file name. Duplicate indices
/// are an error; files without an index are skipped.
VideoSequence load_video(std::filesystem::path const& frames_dir,
                         std::optional<std::filesystem::path> const& masks_dir = std::nullopt);

/// First run of decimal digits in the file stem.
std::optional<int> frame_index(std::filesystem::path const& file);

bool is_image_file(std::filesystem::path const& file);

} // namespace promptseg
