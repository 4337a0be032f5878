#include "hsgc/convert.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "hsgc/error.hpp"

namespace hsgc {
namespace {

constexpr const char* kModule = "convert";

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(kModule, "cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

template <typename T>
T load(const std::uint8_t* p, ByteOrder order) {
  std::uint8_t buf[sizeof(T)];
  std::memcpy(buf, p, sizeof(T));
  const bool native_little = std::endian::native == std::endian::little;
  if ((order == ByteOrder::little) != native_little) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(buf[i], buf[sizeof(T) - 1 - i]);
  }
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

double sample_at(const std::uint8_t* p, SampleType type, ByteOrder order) {
  switch (type) {
    case SampleType::u8: return *p;
    case SampleType::i16: return load<std::int16_t>(p, order);
    case SampleType::u16: return load<std::uint16_t>(p, order);
    case SampleType::i32: return load<std::int32_t>(p, order);
    case SampleType::u32: return load<std::uint32_t>(p, order);
    case SampleType::f32: return load<float>(p, order);
    case SampleType::f64: return load<double>(p, order);
  }
  return 0.0;
}

/// Index of sample (x, y, b) within the raw stream.
std::size_t raw_index(const RawLayout& l, std::size_t x, std::size_t y, std::size_t b) {
  switch (l.interleave) {
    case Interleave::bsq: return (b * l.height + y) * l.width + x;
    case Interleave::bil: return (y * l.bands + b) * l.width + x;
    case Interleave::bip: return (y * l.width + x) * l.bands + b;
  }
  return 0;
}

void check_size(std::span<const std::uint8_t> bytes, const RawLayout& l) {
  if (l.width == 0 || l.height == 0 || l.bands == 0) throw ParameterError(kModule, "raw dimensions must be positive");
  const std::size_t need = l.header_offset + std::size_t{l.width} * l.height * l.bands * sample_bytes(l.type);
  if (bytes.size() < need) {
    throw TruncationError(kModule, "raw file has " + std::to_string(bytes.size()) + " bytes, layout needs " +
                                       std::to_string(need));
  }
}

}  // namespace

SampleType parse_sample_type(const std::string& name) {
  if (name == "u8") return SampleType::u8;
  if (name == "i16") return SampleType::i16;
  if (name == "u16") return SampleType::u16;
  if (name == "i32") return SampleType::i32;
  if (name == "u32") return SampleType::u32;
  if (name == "f32") return SampleType::f32;
  if (name == "f64") return SampleType::f64;
  throw ParameterError(kModule, "unknown sample type '" + name + "'");
}

Interleave parse_interleave(const std::string& name) {
  if (name == "bsq") return Interleave::bsq;
  if (name == "bil") return Interleave::bil;
  if (name == "bip") return Interleave::bip;
  throw ParameterError(kModule, "unknown interleave '" + name + "'");
}

ByteOrder parse_byte_order(const std::string& name) {
  if (name == "little") return ByteOrder::little;
  if (name == "big") return ByteOrder::big;
  throw ParameterError(kModule, "unknown byte order '" + name + "'");
}

std::size_t sample_bytes(SampleType type) {
  switch (type) {
    case SampleType::u8: return 1;
    case SampleType::i16:
    case SampleType::u16: return 2;
    case SampleType::i32:
    case SampleType::u32:
    case SampleType::f32: return 4;
    case SampleType::f64: return 8;
  }
  return 0;
}

HsiCube convert_raw_cube(std::span<const std::uint8_t> bytes, const RawLayout& l) {
  check_size(bytes, l);
  HsiCube cube(l.width, l.height, l.bands);
  const std::size_t size = sample_bytes(l.type);
  const std::uint8_t* base = bytes.data() + l.header_offset;
  for (std::size_t y = 0; y < l.height; ++y) {
    for (std::size_t x = 0; x < l.width; ++x) {
      auto px = cube.pixel(y * l.width + x);
      for (std::size_t b = 0; b < l.bands; ++b) {
        const double v = sample_at(base + raw_index(l, x, y, b) * size, l.type, l.order);
        if (!std::isfinite(v)) {
          throw DataError(kModule, "non-finite sample at pixel (" + std::to_string(x) + "," + std::to_string(y) + ")");
        }
        px[b] = static_cast<float>(v);
      }
    }
  }
  return cube;
}

HsiCube convert_raw_cube(const std::filesystem::path& path, const RawLayout& layout) {
  const auto bytes = slurp(path);
  return convert_raw_cube(bytes, layout);
}

LabelMap convert_raw_labels(std::span<const std::uint8_t> bytes, const RawLayout& l) {
  if (l.bands != 1) throw ParameterError(kModule, "label rasters have exactly one band");
  if (l.type == SampleType::f32 || l.type == SampleType::f64) {
    throw ParameterError(kModule, "label rasters must use an integer sample type");
  }
  check_size(bytes, l);
  LabelMap map(l.width, l.height);
  const std::size_t size = sample_bytes(l.type);
  const std::uint8_t* base = bytes.data() + l.header_offset;
  for (std::size_t p = 0; p < map.pixel_count(); ++p) {
    const double v = sample_at(base + p * size, l.type, l.order);
    if (v < 0 || v > INT32_MAX) throw DataError(kModule, "label value out of range at index " + std::to_string(p));
    map.labels[p] = static_cast<std::int32_t>(v);
  }
  return map;
}

LabelMap convert_raw_labels(const std::filesystem::path& path, const RawLayout& layout) {
  const auto bytes = slurp(path);
  return convert_raw_labels(bytes, layout);
}

}  // namespace hsgc
