#pragma once

// Synthetic fire datasets: filled rectangles or ellipses painted in flame
// colours over a dark blue background, with matching masks on disk.

#include "promptseg/dataset.hpp"
#include "promptseg/image.hpp"
#include "promptseg/image_io.hpp"
#include "promptseg/mask.hpp"

#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <random>

#include <unistd.h>

namespace synthetic {

namespace fs = std::filesystem;

inline constexpr promptseg::Rgb background{20, 30, 90};
inline constexpr promptseg::Rgb flame{250, 120, 10};

enum class Shape { rectangle, ellipse, ring };

/// Paints shape pixels into both the mask and the image.
inline void paint(promptseg::BinaryMask& mask, promptseg::RgbImage& image, Shape shape, int cx, int cy, int rx, int ry)
{
    for (int y = std::max(0, cy - ry); y <= std::min(mask.height() - 1, cy + ry); ++y) {
        for (int x = std::max(0, cx - rx); x <= std::min(mask.width() - 1, cx + rx); ++x) {
            double const nx = double(x - cx) / std::max(rx, 1);
            double const ny = double(y - cy) / std::max(ry, 1);
            double const r2 = nx * nx + ny * ny;
            bool inside = true;
            if (shape == Shape::ellipse) {
                inside = r2 <= 1.0;
            } else if (shape == Shape::ring) {
                inside = r2 <= 1.0 && r2 >= 0.45;
            }
            if (inside) {
                mask.set(x, y);
                image.set(x, y, flame);
            }
        }
    }
}

struct Sample {
    promptseg::RgbImage image;
    promptseg::BinaryMask mask;
};

inline Sample random_sample(std::mt19937& rng, int w, int h, Shape shape, int max_shapes = 3)
{
    Sample s{promptseg::RgbImage(w, h, background), promptseg::BinaryMask(w, h)};
    std::uniform_int_distribution<int> count(1, max_shapes);
    int const n = count(rng);
    for (int k = 0; k < n; ++k) {
        std::uniform_int_distribution<int> rx(3, w / 5);
        std::uniform_int_distribution<int> ry(3, h / 5);
        int const a = rx(rng);
        int const b = ry(rng);
        std::uniform_int_distribution<int> cx(a, w - 1 - a);
        std::uniform_int_distribution<int> cy(b, h - 1 - b);
        paint(s.mask, s.image, shape, cx(rng), cy(rng), a, b);
    }
    return s;
}

/// Writes `count` samples plus manifest.jsonl under `dir`; returns the manifest path.
inline fs::path write_dataset(fs::path const& dir, int count, unsigned seed, int w = 64, int h = 48,
                              bool mixed_shapes = true, Shape only = Shape::rectangle, int max_shapes = 3)
{
    fs::create_directories(dir / "images");
    fs::create_directories(dir / "masks");
    std::mt19937 rng(seed);
    std::string manifest;
    for (int i = 0; i < count; ++i) {
        Shape const shape = mixed_shapes ? (i % 2 == 0 ? Shape::rectangle : Shape::ellipse) : only;
        auto const s = random_sample(rng, w, h, shape, max_shapes);
        auto const img = fmt::format("images/img_{:03}.png", i);
        auto const msk = fmt::format("masks/img_{:03}.png", i);
        promptseg::write_png(dir / img, s.image);
        promptseg::write_mask_png(dir / msk, s.mask);
        manifest += fmt::format(R"({{"image":"{}","mask":"{}","split":"test"}})", img, msk) + "\n";
    }
    auto const path = dir / "manifest.jsonl";
    std::ofstream(path) << manifest;
    return path;
}

/// Frames frame_<i>.png (+ masks) for video benchmarks.
inline void write_video(fs::path const& frames_dir, fs::path const& masks_dir, int count, unsigned seed, int w = 32,
                        int h = 24)
{
    fs::create_directories(frames_dir);
    fs::create_directories(masks_dir);
    std::mt19937 rng(seed);
    for (int i = 0; i < count; ++i) {
        auto const s = random_sample(rng, w, h, Shape::rectangle, 2);
        promptseg::write_png(frames_dir / fmt::format("frame_{}.png", i), s.image);
        promptseg::write_mask_png(masks_dir / fmt::format("frame_{}.png", i), s.mask);
    }
}

inline promptseg::BinaryMask random_mask(std::mt19937& rng, int w, int h, double density)
{
    std::bernoulli_distribution bit(density);
    promptseg::BinaryMask m(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            m.set(x, y, bit(rng));
        }
    }
    return m;
}

/// Scratch directory removed on destruction.
class TempDir {
  public:
    TempDir()
    {
        static int counter = 0;
        path_ = fs::temp_directory_path() / fmt::format("promptseg-test-{}-{}", ::getpid(), counter++);
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(TempDir const&) = delete;
    TempDir& operator=(TempDir const&) = delete;

    fs::path const& path() const { return path_; }
    fs::path operator/(std::string const& rel) const { return path_ / rel; }

  private:
    fs::path path_;
};

} // namespace synthetic
