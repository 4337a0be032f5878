#include "hsgc/hsi_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "hsgc/error.hpp"

namespace hsgc {
namespace {

constexpr const char* kModule = "hsi_io";
constexpr char kMagic[4] = {'H', 'S', 'C', '1'};

std::uint32_t load_u32(const unsigned char* p) {
  return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) |
         (std::uint32_t{p[3]} << 24);
}

void store_u32(std::uint32_t v, unsigned char* p) {
  p[0] = static_cast<unsigned char>(v);
  p[1] = static_cast<unsigned char>(v >> 8);
  p[2] = static_cast<unsigned char>(v >> 16);
  p[3] = static_cast<unsigned char>(v >> 24);
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ifstream in(path, mode);
  if (!in) throw Error(kModule, "cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ofstream out(path, mode);
  if (!out) throw Error(kModule, "cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ostream& out, const std::string& what) {
  out.flush();
  if (!out) throw Error(kModule, "write failed for " + what);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

/// Non-empty lines of a CSV grid, each split into non-negative integers.
std::vector<std::vector<std::int32_t>> parse_int_grid(std::istream& in) {
  std::vector<std::vector<std::int32_t>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (text.empty()) continue;
    std::vector<std::int32_t> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = text.find(',', start);
      const std::string_view cell =
          trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      std::int64_t value = 0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw FormatError(kModule, "line " + std::to_string(line_no) + ": '" + std::string(cell) +
                                       "' is not an integer");
      }
      if (value < 0) {
        throw FormatError(kModule, "line " + std::to_string(line_no) + ": negative value " +
                                       std::to_string(value));
      }
      if (value > INT32_MAX) throw FormatError(kModule, "line " + std::to_string(line_no) + ": value too large");
      row.push_back(static_cast<std::int32_t>(value));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_int_grid(std::span<const std::int32_t> values, std::uint32_t width, std::uint32_t height,
                    std::ostream& out) {
  std::string line;
  for (std::uint32_t y = 0; y < height; ++y) {
    line.clear();
    for (std::uint32_t x = 0; x < width; ++x) {
      if (x) line.push_back(',');
      line += std::to_string(values[std::size_t{y} * width + x]);
    }
    line.push_back('\n');
    out << line;
  }
}

void write_ppm_header(std::ostream& out, std::uint32_t width, std::uint32_t height) {
  out << "P6\n" << width << ' ' << height << "\n255\n";
}

}  // namespace

void HsiCube::validate() const {
  if (width == 0 || height == 0 || bands == 0) {
    throw FormatError(kModule, "cube dimensions must be positive (got " + std::to_string(width) + "x" +
                                   std::to_string(height) + "x" + std::to_string(bands) + ")");
  }
  if (data.size() != std::size_t{width} * height * bands) {
    throw DataError(kModule, "cube payload holds " + std::to_string(data.size()) + " samples, expected " +
                                 std::to_string(std::size_t{width} * height * bands));
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i])) throw DataError(kModule, "non-finite sample at index " + std::to_string(i));
  }
}

int LabelMap::class_count() const {
  std::int32_t c = 0;
  for (std::int32_t v : labels) c = std::max(c, v);
  return c;
}

HsiCube read_cube(std::istream& in) {
  unsigned char header[kCubeHeaderBytes];
  in.read(reinterpret_cast<char*>(header), kCubeHeaderBytes);
  if (in.gcount() != static_cast<std::streamsize>(kCubeHeaderBytes)) {
    throw FormatError(kModule, "file shorter than the 16-byte HSC header");
  }
  if (std::memcmp(header, kMagic, 4) != 0) throw FormatError(kModule, "bad magic, expected \"HSC1\"");

  HsiCube cube;
  cube.width = load_u32(header + 4);
  cube.height = load_u32(header + 8);
  cube.bands = load_u32(header + 12);
  if (cube.width == 0 || cube.height == 0 || cube.bands == 0) {
    throw FormatError(kModule, "header declares an empty cube");
  }

  const std::size_t count = std::size_t{cube.width} * cube.height * cube.bands;
  std::vector<unsigned char> payload(count * 4);
  in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  const auto got = static_cast<std::size_t>(in.gcount());
  if (got != payload.size()) {
    throw TruncationError(kModule, "payload has " + std::to_string(got) + " bytes, expected " +
                                       std::to_string(payload.size()));
  }
  cube.data.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint32_t bits = load_u32(payload.data() + 4 * i);
    std::memcpy(&cube.data[i], &bits, 4);
  }
  cube.validate();
  return cube;
}

HsiCube read_cube(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::binary);
  return read_cube(in);
}

void write_cube(const HsiCube& cube, std::ostream& out) {
  cube.validate();
  std::vector<unsigned char> buffer(kCubeHeaderBytes + cube.data.size() * 4);
  std::memcpy(buffer.data(), kMagic, 4);
  store_u32(cube.width, buffer.data() + 4);
  store_u32(cube.height, buffer.data() + 8);
  store_u32(cube.bands, buffer.data() + 12);
  for (std::size_t i = 0; i < cube.data.size(); ++i) {
    std::uint32_t bits;
    std::memcpy(&bits, &cube.data[i], 4);
    store_u32(bits, buffer.data() + kCubeHeaderBytes + 4 * i);
  }
  out.write(reinterpret_cast<const char*>(buffer.data()), static_cast<std::streamsize>(buffer.size()));
  finish(out, "cube");
}

void write_cube(const HsiCube& cube, const std::filesystem::path& path) {
  cube.validate();
  auto out = open_out(path, std::ios::binary);
  write_cube(cube, out);
}

LabelMap read_label_map(std::istream& in, std::uint32_t width, std::uint32_t height) {
  const auto rows = parse_int_grid(in);
  if (rows.size() != height) {
    throw FormatError(kModule, "label map has " + std::to_string(rows.size()) + " rows, expected " +
                                   std::to_string(height));
  }
  LabelMap map(width, height);
  for (std::uint32_t y = 0; y < height; ++y) {
    if (rows[y].size() != width) {
      throw FormatError(kModule, "label map row " + std::to_string(y + 1) + " has " +
                                     std::to_string(rows[y].size()) + " columns, expected " +
                                     std::to_string(width));
    }
    std::copy(rows[y].begin(), rows[y].end(), map.labels.begin() + std::size_t{y} * width);
  }
  return map;
}

LabelMap read_label_map(const std::filesystem::path& path, std::uint32_t width, std::uint32_t height) {
  auto in = open_in(path, std::ios::in);
  return read_label_map(in, width, height);
}

LabelMap read_label_map(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::in);
  const auto rows = parse_int_grid(in);
  if (rows.empty()) throw FormatError(kModule, "label map '" + path.string() + "' is empty");
  std::stringstream again;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) again << (i ? "," : "") << row[i];
    again << '\n';
  }
  return read_label_map(again, static_cast<std::uint32_t>(rows.front().size()),
                        static_cast<std::uint32_t>(rows.size()));
}

void write_label_map(const LabelMap& labels, std::ostream& out) {
  write_int_grid(labels.labels, labels.width, labels.height, out);
  finish(out, "label map");
}

void write_label_map(const LabelMap& labels, const std::filesystem::path& path) {
  auto out = open_out(path, std::ios::out);
  write_label_map(labels, out);
}

SegMap read_seg_map(std::istream& in) {
  const auto rows = parse_int_grid(in);
  if (rows.empty()) throw FormatError(kModule, "segmentation map is empty");
  SegMap seg;
  seg.width = static_cast<std::uint32_t>(rows.front().size());
  seg.height = static_cast<std::uint32_t>(rows.size());
  seg.assignment.reserve(seg.pixel_count());
  for (std::size_t y = 0; y < rows.size(); ++y) {
    if (rows[y].size() != seg.width) {
      throw FormatError(kModule, "segmentation row " + std::to_string(y + 1) + " is ragged");
    }
    seg.assignment.insert(seg.assignment.end(), rows[y].begin(), rows[y].end());
  }
  const std::int32_t max_index = *std::max_element(seg.assignment.begin(), seg.assignment.end());
  seg.count = max_index + 1;
  std::vector<char> seen(static_cast<std::size_t>(seg.count), 0);
  for (std::int32_t v : seg.assignment) seen[static_cast<std::size_t>(v)] = 1;
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    throw FormatError(kModule, "segmentation map has empty superpixel indices");
  }
  return seg;
}

SegMap read_seg_map(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::in);
  return read_seg_map(in);
}

void write_seg_map(const SegMap& seg, std::ostream& out) {
  write_int_grid(seg.assignment, seg.width, seg.height, out);
  finish(out, "segmentation map");
}

void write_seg_map(const SegMap& seg, const std::filesystem::path& path) {
  auto out = open_out(path, std::ios::out);
  write_seg_map(seg, out);
}

const std::vector<Rgb>& default_palette() {
  static const std::vector<Rgb> palette = {
      {0, 0, 0},       {230, 25, 75},   {60, 180, 75},   {255, 225, 25},  {0, 130, 200},
      {245, 130, 48},  {145, 30, 180},  {70, 240, 240},  {240, 50, 230},  {210, 245, 60},
      {250, 190, 212}, {0, 128, 128},   {220, 190, 255}, {170, 110, 40},  {255, 250, 200},
      {128, 0, 0},     {170, 255, 195}, {128, 128, 0},   {255, 215, 180}, {0, 0, 128},
      {128, 128, 128}, {255, 255, 255}, {100, 100, 255}, {0, 90, 0},
  };
  return palette;
}

void render_class_map(const LabelMap& labels, std::span<const Rgb> palette, std::ostream& out) {
  std::vector<std::uint8_t> payload(labels.pixel_count() * 3);
  for (std::size_t i = 0; i < labels.pixel_count(); ++i) {
    const std::int32_t c = labels.labels[i];
    if (c < 0 || static_cast<std::size_t>(c) >= palette.size()) {
      throw ParameterError(kModule, "class " + std::to_string(c) + " is outside the " +
                                        std::to_string(palette.size()) + "-entry palette");
    }
    const Rgb& rgb = palette[static_cast<std::size_t>(c)];
    std::copy(rgb.begin(), rgb.end(), payload.begin() + 3 * i);
  }
  write_ppm_header(out, labels.width, labels.height);
  out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  finish(out, "PPM image");
}

void render_class_map(const LabelMap& labels, std::span<const Rgb> palette, const std::filesystem::path& path) {
  auto out = open_out(path, std::ios::binary);
  render_class_map(labels, palette, out);
}

void render_boundary_overlay(const LabelMap& labels, const SegMap& seg, std::span<const Rgb> palette,
                             const std::filesystem::path& path) {
  if (labels.width != seg.width || labels.height != seg.height) {
    throw ParameterError(kModule, "overlay label map and segmentation differ in size");
  }
  std::ostringstream body;
  render_class_map(labels, palette, body);
  std::string bytes = body.str();
  const std::size_t offset = bytes.size() - labels.pixel_count() * 3;
  const std::uint32_t w = seg.width;
  const std::uint32_t h = seg.height;
  for (std::uint32_t y = 0; y < h; ++y) {
    for (std::uint32_t x = 0; x < w; ++x) {
      const std::size_t i = std::size_t{y} * w + x;
      const bool edge = (x + 1 < w && seg.assignment[i + 1] != seg.assignment[i]) ||
                        (y + 1 < h && seg.assignment[i + w] != seg.assignment[i]);
      if (edge) std::fill_n(bytes.begin() + static_cast<std::ptrdiff_t>(offset + 3 * i), 3, '\xff');
    }
  }
  auto out = open_out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  finish(out, "overlay image");
}

}  // namespace hsgc
