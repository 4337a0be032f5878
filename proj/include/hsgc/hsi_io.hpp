#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace hsgc {

/// W x H x B cube of spectral samples, pixel-interleaved in raster order:
/// the B samples of pixel (x, y) start at ((y * W) + x) * B.
struct HsiCube {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t bands = 0;
  std::vector<float> data;

  HsiCube() = default;
  HsiCube(std::uint32_t w, std::uint32_t h, std::uint32_t b)
      : width(w), height(h), bands(b), data(std::size_t{w} * h * b, 0.0f) {}

  std::size_t pixel_count() const { return std::size_t{width} * height; }

  std::span<const float> pixel(std::size_t index) const {
    return {data.data() + index * bands, bands};
  }
  std::span<float> pixel(std::size_t index) { return {data.data() + index * bands, bands}; }
  std::span<const float> pixel(std::uint32_t x, std::uint32_t y) const {
    return pixel(std::size_t{y} * width + x);
  }

  /// Throws DataError/FormatError when dimensions or samples are invalid.
  void validate() const;
};

/// Per-pixel class ids; 0 = unlabeled, 1..c = classes.
struct LabelMap {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::int32_t> labels;

  LabelMap() = default;
  LabelMap(std::uint32_t w, std::uint32_t h)
      : width(w), height(h), labels(std::size_t{w} * h, 0) {}

  std::size_t pixel_count() const { return std::size_t{width} * height; }
  std::int32_t at(std::uint32_t x, std::uint32_t y) const { return labels[std::size_t{y} * width + x]; }

  /// Largest class id present (0 for an all-unlabeled map).
  int class_count() const;
};

/// Partition of the pixel grid into `count` superpixels.
struct SegMap {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::int32_t> assignment;
  int count = 0;

  std::size_t pixel_count() const { return std::size_t{width} * height; }
};

using Rgb = std::array<std::uint8_t, 3>;

HsiCube read_cube(const std::filesystem::path& path);
HsiCube read_cube(std::istream& in);
void write_cube(const HsiCube& cube, const std::filesystem::path& path);
void write_cube(const HsiCube& cube, std::ostream& out);

/// Size in bytes of the HSC header (magic + W, H, B).
inline constexpr std::size_t kCubeHeaderBytes = 16;

LabelMap read_label_map(const std::filesystem::path& path, std::uint32_t width, std::uint32_t height);
LabelMap read_label_map(std::istream& in, std::uint32_t width, std::uint32_t height);
/// Reads a label CSV and takes its dimensions from the file itself.
LabelMap read_label_map(const std::filesystem::path& path);
void write_label_map(const LabelMap& labels, const std::filesystem::path& path);
void write_label_map(const LabelMap& labels, std::ostream& out);

/// Reads a segmentation CSV; `count` is max index + 1 and every index in
/// 0..count-1 must occur.
SegMap read_seg_map(const std::filesystem::path& path);
SegMap read_seg_map(std::istream& in);
void write_seg_map(const SegMap& seg, const std::filesystem::path& path);
void write_seg_map(const SegMap& seg, std::ostream& out);

/// The fixed 24-entry class palette; entry 0 is black (unclassified).
const std::vector<Rgb>& default_palette();

void render_class_map(const LabelMap& labels, std::span<const Rgb> palette, const std::filesystem::path& path);
void render_class_map(const LabelMap& labels, std::span<const Rgb> palette, std::ostream& out);

/// Class map with superpixel borders drawn in white.
void render_boundary_overlay(const LabelMap& labels, const SegMap& seg, std::span<const Rgb> palette,
                             const std::filesystem::path& path);

}  // namespace hsgc
