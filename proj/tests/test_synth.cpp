#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "hsgc/error.hpp"
#include "hsgc/hsi_io.hpp"
#include "hsgc/synth.hpp"

using namespace hsgc;

namespace {

std::string file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("generation is deterministic per seed") {
  SynthSpec spec;
  spec.width = 20;
  spec.height = 12;
  const SynthData a = generate(spec);
  const SynthData b = generate(spec);
  CHECK(a.cube.data == b.cube.data);
  CHECK(a.truth.labels == b.truth.labels);
  spec.rng_seed = 8;
  CHECK(generate(spec).cube.data != a.cube.data);
}

TEST_CASE("zero noise reproduces the class signatures exactly") {
  SynthSpec spec;
  spec.width = 16;
  spec.height = 16;
  spec.bands = 8;
  spec.noise_sigma = 0.0;
  const SynthData d = generate(spec);
  for (std::size_t p = 0; p < d.cube.pixel_count(); ++p) {
    const int c = d.truth.labels[p] - 1;
    const auto px = d.cube.pixel(p);
    for (std::uint32_t b = 0; b < spec.bands; ++b) CHECK(px[b] == static_cast<float>(d.signatures(c, b)));
  }
}

TEST_CASE("two pixels, two classes: one pixel per class") {
  SynthSpec spec;
  spec.width = 2;
  spec.height = 1;
  spec.classes = 2;
  spec.region_seeds = 2;
  const SynthData d = generate(spec);
  CHECK(std::set<int>(d.truth.labels.begin(), d.truth.labels.end()) == std::set<int>{1, 2});
}

TEST_CASE("signatures are separated, smooth in [0, 1], and every class appears") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SynthSpec spec;
    spec.width = 32;
    spec.height = 24;
    spec.classes = 2 + static_cast<int>(seed % 5);
    spec.region_seeds = spec.classes + static_cast<int>(seed % 7);
    spec.rng_seed = seed;
    const SynthData d = generate(spec);
    for (int i = 0; i < spec.classes; ++i) {
      CHECK(d.signatures.row(i).minCoeff() >= 0.0);
      CHECK(d.signatures.row(i).maxCoeff() <= 1.0);
      for (int j = i + 1; j < spec.classes; ++j) {
        CHECK((d.signatures.row(i) - d.signatures.row(j)).norm() >= kSignatureSeparation);
      }
    }
    const std::set<int> present(d.truth.labels.begin(), d.truth.labels.end());
    CHECK(static_cast<int>(present.size()) == spec.classes);
    CHECK(*present.begin() == 1);
    const std::set<int> regions(d.regions.labels.begin(), d.regions.labels.end());
    CHECK(static_cast<int>(regions.size()) == spec.region_seeds);
  }
}

TEST_CASE("invalid scene parameters") {
  SynthSpec spec;
  spec.width = 3;
  spec.height = 3;
  spec.region_seeds = 10;
  CHECK_THROWS_AS(generate(spec), ParameterError);
  spec.region_seeds = 2;
  CHECK_THROWS_AS(generate(spec), ParameterError);
  spec = SynthSpec{};
  spec.classes = 1;
  CHECK_THROWS_AS(generate(spec), ParameterError);
  spec = SynthSpec{};
  spec.noise_sigma = -1.0;
  CHECK_THROWS_AS(generate(spec), ParameterError);
}

TEST_CASE("committed fixture matches the generator byte for byte") {
  const std::filesystem::path dir = HSGC_FIXTURE_DIR;
  const SynthData d = generate(SynthSpec{});
  std::ostringstream cube;
  write_cube(d.cube, cube);
  CHECK(cube.str() == file_bytes(dir / "synth_64x64x16.hsc"));
  std::ostringstream truth;
  write_label_map(d.truth, truth);
  CHECK(truth.str() == file_bytes(dir / "synth_64x64x16_truth.csv"));
}
