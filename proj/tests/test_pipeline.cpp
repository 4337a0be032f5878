#include <doctest.h>

#include <filesystem>

#include "hsgc/error.hpp"
#include "hsgc/pipeline.hpp"
#include "hsgc/synth.hpp"

using namespace hsgc;

namespace {

SynthData small_scene() {
  SynthSpec spec;
  spec.width = 32;
  spec.height = 24;
  spec.bands = 8;
  spec.region_seeds = 8;
  return generate(spec);
}

}  // namespace

TEST_CASE("no seeds means an empty label column space") {
  const SynthData d = small_scene();
  PipelineConfig config;
  config.labels_per_class = 0;
  try {
    run_pipeline(config, d.cube, d.truth);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("empty label column space") != std::string::npos);
  }
}

TEST_CASE("runs are deterministic and trials draw different seeds") {
  const SynthData d = small_scene();
  PipelineConfig config;
  config.trials = 3;
  config.rng_seed = 11;
  const PipelineRun a = run_pipeline(config, d.cube, d.truth);
  const PipelineRun b = run_pipeline(config, d.cube, d.truth);
  REQUIRE(a.trials.size() == 3);
  for (std::size_t t = 0; t < 3; ++t) {
    CHECK(a.trials[t].prediction.labels == b.trials[t].prediction.labels);
    CHECK(a.trials[t].report.oa == b.trials[t].report.oa);
  }
  CHECK(a.trials[0].seeds.seeds.labels != a.trials[1].seeds.seeds.labels);
  CHECK(a.trials[1].seeds.seeds.labels != a.trials[2].seeds.seeds.labels);
  CHECK(a.summary.trials == 3);
  for (const auto& t : a.trials) {
    CHECK(t.report.excluded_seed_pixels == 4 * config.labels_per_class);
    CHECK(t.propagation.converged);
    CHECK(t.report.oa > 0.5);
  }
}

TEST_CASE("mismatched truth is rejected") {
  const SynthData d = small_scene();
  CHECK_THROWS_AS(run_pipeline(PipelineConfig{}, d.cube, LabelMap(5, 5)), ParameterError);
  PipelineConfig bad;
  bad.alpha = 1.0;
  CHECK_THROWS_AS(run_pipeline(bad, d.cube, d.truth), ConfigError);
}

TEST_CASE("file-level run writes every artifact") {
  const SynthData d = small_scene();
  const auto dir = std::filesystem::temp_directory_path() / "hsgc_test_pipeline";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  write_cube(d.cube, dir / "cube.hsc");
  write_label_map(d.truth, dir / "truth.csv");
  PipelineConfig config;
  config.trials = 2;
  const PipelineRun run = run_pipeline(config, dir / "cube.hsc", dir / "truth.csv", dir / "out");
  for (const char* name : {"segmentation.csv", "features.csv", "graph.csv", "seeds.csv", "F.csv", "prediction.csv",
                           "classification.ppm", "overlay.ppm", "trials.csv", "report.txt"}) {
    CHECK_MESSAGE(std::filesystem::exists(dir / "out" / name), name);
  }
  const LabelMap back = read_label_map(dir / "out" / "prediction.csv", d.cube.width, d.cube.height);
  CHECK(back.labels == run.trials[0].prediction.labels);
  std::filesystem::remove_all(dir);
}
