#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include "hsgc/hsi_io.hpp"

namespace hsgc {

enum class SampleType { u8, i16, u16, i32, u32, f32, f64 };
enum class Interleave { bsq, bil, bip };
enum class ByteOrder { little, big };

/// Layout of a headerless raw raster, as exported by ENVI-style tools.
struct RawLayout {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t bands = 1;
  SampleType type = SampleType::f32;
  Interleave interleave = Interleave::bsq;
  ByteOrder order = ByteOrder::little;
  std::uint64_t header_offset = 0;
};

SampleType parse_sample_type(const std::string& name);
Interleave parse_interleave(const std::string& name);
ByteOrder parse_byte_order(const std::string& name);
std::size_t sample_bytes(SampleType type);

/// Reorders a raw raster into a pixel-interleaved cube of floats.
HsiCube convert_raw_cube(std::span<const std::uint8_t> bytes, const RawLayout& layout);
HsiCube convert_raw_cube(const std::filesystem::path& path, const RawLayout& layout);

/// Single-band integer raster to a label map (bands must be 1).
LabelMap convert_raw_labels(std::span<const std::uint8_t> bytes, const RawLayout& layout);
LabelMap convert_raw_labels(const std::filesystem::path& path, const RawLayout& layout);

}  // namespace hsgc
