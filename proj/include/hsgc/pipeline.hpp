#pragma once

#include <filesystem>
#include <vector>

#include "hsgc/config.hpp"
#include "hsgc/covfield.hpp"
#include "hsgc/dimred.hpp"
#include "hsgc/features.hpp"
#include "hsgc/graph.hpp"
#include "hsgc/hsi_io.hpp"
#include "hsgc/lgc.hpp"
#include "hsgc/metrics.hpp"
#include "hsgc/superpix.hpp"

namespace hsgc {

/// Reduced cube through superpixel segmentation.
struct Segmentation {
  PcaModel pca;
  HsiCube reduced;
  double epsilon = 0.0;
  DensityField density;
  SegResult result;
};

Segmentation segment_cube(const PipelineConfig& config, const HsiCube& cube);

/// Everything that does not depend on the labeled pixels.
struct PreparedScene {
  Segmentation segmentation;
  SuperpixelFeatures features;
  SimilarityGraph graph;
  SparseOperator affinity;
};

PreparedScene prepare_scene(const PipelineConfig& config, const HsiCube& cube);

struct TrialOutcome {
  SeedSample seeds;
  SeedMatrix seed_matrix;
  PropagationResult propagation;
  LabelMap prediction;
  EvalReport report;
};

/// Propagates `seeds` over the prepared graph and returns the pixel map.
/// Throws when no superpixel carries a seed ("empty label column space").
LabelMap classify(const PipelineConfig& config, const SegMap& seg, const SparseOperator& affinity,
                  const LabelMap& seeds, int classes, SeedMatrix* seed_matrix = nullptr,
                  PropagationResult* propagation = nullptr);

/// Seeds are drawn with rng_seed + trial.
TrialOutcome run_trial(const PipelineConfig& config, const PreparedScene& scene, const LabelMap& truth, int trial);

struct PipelineRun {
  PreparedScene scene;
  std::vector<TrialOutcome> trials;
  TrialSummary summary;
};

PipelineRun run_pipeline(const PipelineConfig& config, const HsiCube& cube, const LabelMap& truth);

/// File-level entry: reads the inputs, runs every trial and writes the
/// artifacts of trial 0 plus report.txt and trials.csv into out_dir.
PipelineRun run_pipeline(const PipelineConfig& config, const std::filesystem::path& cube_path,
                         const std::filesystem::path& truth_path, const std::filesystem::path& out_dir);

void write_run_report(const PipelineConfig& config, const PipelineRun& run, std::ostream& out);

}  // namespace hsgc
