#include <doctest.h>

#include <bit>
#include <cstring>

#include "hsgc/convert.hpp"
#include "hsgc/error.hpp"

using namespace hsgc;

namespace {

template <typename T>
void put(std::vector<std::uint8_t>& out, T v, ByteOrder order) {
  std::uint8_t buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  if ((order == ByteOrder::big) == (std::endian::native == std::endian::little)) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(buf[i], buf[sizeof(T) - 1 - i]);
  }
  out.insert(out.end(), buf, buf + sizeof(T));
}

// Value of sample (x, y, b) in the test rasters.
float value(std::size_t x, std::size_t y, std::size_t b) { return static_cast<float>(100 * b + 10 * y + x); }

template <typename T>
std::vector<std::uint8_t> encode(const RawLayout& l) {
  std::vector<std::uint8_t> out(l.header_offset, 0xAB);
  auto emit = [&](std::size_t x, std::size_t y, std::size_t b) { put<T>(out, static_cast<T>(value(x, y, b)), l.order); };
  for (std::size_t i = 0; i < l.bands; ++i)
    for (std::size_t j = 0; j < l.height; ++j)
      for (std::size_t k = 0; k < l.width; ++k) {
        if (l.interleave == Interleave::bsq) emit(k, j, i);
      }
  for (std::size_t y = 0; y < l.height; ++y) {
    if (l.interleave == Interleave::bil) {
      for (std::size_t b = 0; b < l.bands; ++b)
        for (std::size_t x = 0; x < l.width; ++x) emit(x, y, b);
    }
    if (l.interleave == Interleave::bip) {
      for (std::size_t x = 0; x < l.width; ++x)
        for (std::size_t b = 0; b < l.bands; ++b) emit(x, y, b);
    }
  }
  return out;
}

template <typename T>
void check_layout(SampleType type) {
  for (Interleave il : {Interleave::bsq, Interleave::bil, Interleave::bip}) {
    for (ByteOrder order : {ByteOrder::little, ByteOrder::big}) {
      RawLayout l;
      l.width = 4;
      l.height = 3;
      l.bands = 2;
      l.type = type;
      l.interleave = il;
      l.order = order;
      l.header_offset = 5;
      const HsiCube cube = convert_raw_cube(encode<T>(l), l);
      for (std::size_t y = 0; y < 3; ++y)
        for (std::size_t x = 0; x < 4; ++x)
          for (std::size_t b = 0; b < 2; ++b) CHECK(cube.pixel(y * 4 + x)[b] == value(x, y, b));
    }
  }
}

}  // namespace

TEST_CASE("every interleave, sample type and byte order") {
  check_layout<std::uint8_t>(SampleType::u8);
  check_layout<std::int16_t>(SampleType::i16);
  check_layout<std::uint16_t>(SampleType::u16);
  check_layout<std::int32_t>(SampleType::i32);
  check_layout<std::uint32_t>(SampleType::u32);
  check_layout<float>(SampleType::f32);
  check_layout<double>(SampleType::f64);
}

TEST_CASE("truncated rasters and bad names") {
  RawLayout l;
  l.width = 4;
  l.height = 4;
  l.bands = 3;
  std::vector<std::uint8_t> bytes(4 * 4 * 3 * 4 - 1);
  CHECK_THROWS_AS(convert_raw_cube(bytes, l), TruncationError);
  CHECK_THROWS_AS(parse_sample_type("f16"), ParameterError);
  CHECK_THROWS_AS(parse_interleave("bxs"), ParameterError);
  CHECK_THROWS_AS(parse_byte_order("middle"), ParameterError);
  CHECK(parse_sample_type("i16") == SampleType::i16);
  CHECK(sample_bytes(SampleType::f64) == 8);
}

TEST_CASE("non-finite samples are rejected") {
  RawLayout l;
  l.width = 1;
  l.height = 1;
  l.bands = 1;
  std::vector<std::uint8_t> bytes;
  put<float>(bytes, std::numeric_limits<float>::quiet_NaN(), ByteOrder::little);
  CHECK_THROWS_AS(convert_raw_cube(bytes, l), DataError);
}

TEST_CASE("label rasters") {
  RawLayout l;
  l.width = 3;
  l.height = 2;
  l.bands = 1;
  l.type = SampleType::u16;
  l.order = ByteOrder::big;
  std::vector<std::uint8_t> bytes;
  for (std::uint16_t v : {0, 1, 2, 2, 1, 16}) put<std::uint16_t>(bytes, v, ByteOrder::big);
  const LabelMap m = convert_raw_labels(bytes, l);
  CHECK(m.labels == std::vector<std::int32_t>{0, 1, 2, 2, 1, 16});

  l.type = SampleType::i16;
  std::vector<std::uint8_t> negative;
  for (std::int16_t v : {0, 1, -2, 2, 1, 3}) put<std::int16_t>(negative, v, ByteOrder::big);
  CHECK_THROWS_AS(convert_raw_labels(negative, l), DataError);
  l.type = SampleType::f32;
  CHECK_THROWS_AS(convert_raw_labels(bytes, l), ParameterError);
  l.type = SampleType::u8;
  l.bands = 2;
  CHECK_THROWS_AS(convert_raw_labels(bytes, l), ParameterError);
}
