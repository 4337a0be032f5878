#include "hsgc/pipeline.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>

#include "hsgc/error.hpp"
#include "hsgc/parallel.hpp"

namespace hsgc {

Segmentation segment_cube(const PipelineConfig& config, const HsiCube& cube) {
  config.validate();
  Segmentation s;
  s.pca = fit_pca(cube, config.variance_target, config.max_bands);
  s.reduced = project(cube, s.pca);
  s.epsilon = default_epsilon(s.reduced, config.cov_epsilon_scale);
  const LogCovField field = build_log_cov_field(s.reduced, config.cov_window, s.epsilon);
  s.density = content_density(field, {config.density_lambda, config.density_gmin, config.density_smoothing});
  const SegParams params{config.compactness, config.max_iters, config.seg_tol};
  s.result = segment(field, resolve_superpixels(config, cube.pixel_count()), s.density, params);
  return s;
}

PreparedScene prepare_scene(const PipelineConfig& config, const HsiCube& cube) {
  PreparedScene scene;
  scene.segmentation = segment_cube(config, cube);
  scene.features = extract_features(scene.segmentation.reduced, scene.segmentation.result.seg, config.h);
  scene.graph = build_graph(scene.features, {config.beta, config.sigma_s, config.sigma_l, config.knn});
  scene.affinity = normalized_affinity(scene.graph);
  return scene;
}

LabelMap classify(const PipelineConfig& config, const SegMap& seg, const SparseOperator& affinity,
                  const LabelMap& seeds, int classes, SeedMatrix* seed_matrix, PropagationResult* propagation) {
  if (classes <= 0) throw Error("lgc", "no classes to propagate");
  SeedMatrix y = build_seed_matrix(seg, seeds, classes);
  if (y.y.isZero(0.0)) throw Error("lgc", "empty label column space (no superpixel holds a seed pixel)");
  PropagationResult r = propagate(affinity, y.y, {config.alpha, config.lgc_tol, config.lgc_max_iters});
  LabelMap out = finalize_labels(r.f, seg);
  if (seed_matrix) *seed_matrix = std::move(y);
  if (propagation) *propagation = std::move(r);
  return out;
}

TrialOutcome run_trial(const PipelineConfig& config, const PreparedScene& scene, const LabelMap& truth, int trial) {
  const SegMap& seg = scene.segmentation.result.seg;
  if (truth.width != seg.width || truth.height != seg.height) {
    throw ParameterError("pipeline", "ground truth and cube differ in size");
  }
  TrialOutcome t;
  t.seeds = sample_seeds(truth, config.labels_per_class, config.rng_seed + static_cast<std::uint64_t>(trial));
  t.prediction = classify(config, seg, scene.affinity, t.seeds.seeds, truth.class_count(), &t.seed_matrix,
                          &t.propagation);
  t.report = evaluate(t.prediction, truth, t.seeds.seeds, config.include_seeds);
  return t;
}

PipelineRun run_pipeline(const PipelineConfig& config, const HsiCube& cube, const LabelMap& truth) {
  config.validate();
  set_thread_count(config.threads);
  if (truth.width != cube.width || truth.height != cube.height) {
    throw ParameterError("pipeline", "ground truth and cube differ in size");
  }
  PipelineRun run;
  run.scene = prepare_scene(config, cube);
  std::vector<EvalReport> reports;
  for (int t = 0; t < config.trials; ++t) {
    run.trials.push_back(run_trial(config, run.scene, truth, t));
    reports.push_back(run.trials.back().report);
  }
  run.summary = summarize(reports);
  return run;
}

void write_run_report(const PipelineConfig& config, const PipelineRun& run, std::ostream& out) {
  const auto& seg = run.scene.segmentation;
  out << std::setprecision(6) << std::fixed;
  out << "width: " << seg.reduced.width << '\n' << "height: " << seg.reduced.height << '\n';
  out << "bands: " << seg.pca.bands() << '\n' << "reduced_bands: " << seg.pca.reduced_bands() << '\n';
  out << "explained_ratio: " << seg.pca.explained_ratio << '\n';
  out << "superpixels_requested: " << resolve_superpixels(config, seg.reduced.pixel_count()) << '\n';
  out << "superpixels: " << seg.result.seg.count << '\n';
  out << "segmentation_iterations: " << seg.result.iterations << '\n';
  out << "graph_edges: " << run.scene.graph.edges.size() << '\n';
  out << "sigma_s: " << run.scene.graph.sigma_s << '\n' << "sigma_l: " << run.scene.graph.sigma_l << '\n';
  out << "h: " << run.scene.features.h << '\n';
  out << "labels_per_class: " << config.labels_per_class << '\n';
  out.unsetf(std::ios::floatfield);
  write_summary(run.summary, out);
  for (std::size_t t = 0; t < run.trials.size(); ++t) {
    const auto& trial = run.trials[t];
    out << "trial " << t << ":\n";
    out << "lgc_iterations: " << trial.propagation.iterations << '\n';
    out << "lgc_converged: " << (trial.propagation.converged ? "true" : "false") << '\n';
    if (!trial.seeds.short_classes.empty()) {
      out << "warning_short_classes:";
      for (int c : trial.seeds.short_classes) out << ' ' << c;
      out << '\n';
    }
    write_report(trial.report, out);
  }
}

PipelineRun run_pipeline(const PipelineConfig& config, const std::filesystem::path& cube_path,
                         const std::filesystem::path& truth_path, const std::filesystem::path& out_dir) {
  const HsiCube cube = read_cube(cube_path);
  const LabelMap truth = read_label_map(truth_path, cube.width, cube.height);
  PipelineRun run = run_pipeline(config, cube, truth);

  std::filesystem::create_directories(out_dir);
  const auto& seg = run.scene.segmentation.result.seg;
  write_seg_map(seg, out_dir / "segmentation.csv");
  write_features_csv(run.scene.features, out_dir / "features.csv");
  write_graph_csv(run.scene.graph, out_dir / "graph.csv");
  const TrialOutcome& first = run.trials.front();
  write_label_map(first.seeds.seeds, out_dir / "seeds.csv");
  write_label_matrix_csv(first.propagation.f, out_dir / "F.csv");
  write_label_map(first.prediction, out_dir / "prediction.csv");
  render_class_map(first.prediction, default_palette(), out_dir / "classification.ppm");
  render_boundary_overlay(first.prediction, seg, default_palette(), out_dir / "overlay.ppm");
  {
    std::ofstream csv(out_dir / "trials.csv");
    std::vector<EvalReport> reports;
    for (const auto& t : run.trials) reports.push_back(t.report);
    write_trials_csv(reports, csv);
  }
  std::ofstream report(out_dir / "report.txt");
  if (!report) throw Error("pipeline", "cannot write report.txt");
  write_run_report(config, run, report);
  return run;
}

}  // namespace hsgc
