// Serial reference kernels against their OpenMP counterparts.
#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "hsgc/covfield.hpp"
#include "hsgc/dimred.hpp"
#include "hsgc/features.hpp"
#include "hsgc/graph.hpp"
#include "hsgc/lgc.hpp"
#include "hsgc/parallel.hpp"
#include "hsgc/reference.hpp"
#include "hsgc/superpix.hpp"
#include "hsgc/synth.hpp"

using namespace hsgc;

namespace {

double median_ms(int reps, const std::function<void()>& fn) {
  std::vector<double> times;
  for (int r = 0; r < reps; ++r) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    times.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
  }
  std::sort(times.begin(), times.end());
  return times[times.size() / 2];
}

struct Kernel {
  std::string name;
  std::function<void()> serial;
  std::function<void()> parallel;
  std::function<double()> max_difference;  // after one run of each
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark the OpenMP kernels against the serial reference"};
  std::uint32_t size = 128;
  std::uint32_t bands = 32;
  int reps = 3;
  std::vector<int> threads;
  std::string csv_path;
  app.add_option("--size", size, "Synthetic scene width and height");
  app.add_option("--bands", bands, "Synthetic scene bands");
  app.add_option("--reps", reps, "Repetitions per timing (median reported)")->check(CLI::PositiveNumber);
  app.add_option("--threads", threads, "Thread counts to time (default: 1, 2, 4, ... up to the runtime maximum)")
      ->delimiter(',');
  app.add_option("--csv", csv_path, "Also write the results as CSV");
  CLI11_PARSE(app, argc, argv);

  const int max_threads = thread_count();
  if (threads.empty()) {
    for (int t = 1; t < max_threads; t *= 2) threads.push_back(t);
    threads.push_back(max_threads);
  }

  SynthSpec spec;
  spec.width = size;
  spec.height = size;
  spec.bands = bands;
  spec.region_seeds = 40;
  const SynthData data = generate(spec);
  const PcaModel model = fit_pca(data.cube, 0.98, 6);
  const HsiCube reduced = project(data.cube, model);
  const double eps = default_epsilon(reduced, 1e-3);
  const LogCovField field = build_log_cov_field(reduced, 5, eps);
  const DensityField density = content_density(field);
  const int k = static_cast<int>(size * size / 16);
  const SegResult seg = segment(field, k, density);
  const double interval = grid_interval(field.width, field.height, k);
  std::vector<double> ranges;
  for (const Centroid& c : seg.centroids) ranges.push_back(search_range(c, density, interval));
  const SuperpixelFeatures features = extract_features(reduced, seg.seg);
  const auto [sigma_s, sigma_l] = kernel_widths(features, GraphParams{});
  const SimilarityGraph graph = build_graph(features);
  const SparseOperator affinity = normalized_affinity(graph);
  LabelMatrix y = LabelMatrix::Zero(affinity.n, 4);
  for (int i = 0; i < affinity.n; i += 37) y(i, i % 4) = 1.0;
  constexpr int kSteps = 50;

  std::printf("scene %ux%ux%u, reduced to %d bands, %d superpixels, %zu graph edges, max threads %d\n", size, size,
              bands, model.reduced_bands(), seg.seg.count, graph.edges.size(), max_threads);

  Eigen::MatrixXd cov_a, cov_b;
  LogCovField field_a, field_b;
  std::vector<std::int32_t> labels_a(field.pixel_count()), labels_b(field.pixel_count());
  std::vector<double> cost_a(field.pixel_count()), cost_b(field.pixel_count());
  std::vector<std::vector<int>> knn_a, knn_b;
  LabelMatrix f_a, f_b;

  const std::vector<Kernel> kernels = {
      {"band covariance", [&] { cov_a = reference::sample_covariance(data.cube, model.mean); },
       [&] { cov_b = sample_covariance(data.cube, model.mean); },
       [&] { return (cov_a - cov_b).cwiseAbs().maxCoeff(); }},
      {"log-covariance field", [&] { field_a = reference::build_log_cov_field(reduced, 5, eps); },
       [&] { field_b = build_log_cov_field(reduced, 5, eps); },
       [&] {
         double d = 0.0;
         for (std::size_t i = 0; i < field_a.logs.size(); ++i) d = std::max(d, std::abs(field_a.logs[i] - field_b.logs[i]));
         return d;
       }},
      {"pixel assignment",
       [&] {
         reference::assign_pixels(field, seg.centroids, ranges, 10.0, interval, seg.seg.assignment, labels_a, cost_a);
       },
       [&] { assign_pixels(field, seg.centroids, ranges, 10.0, interval, seg.seg.assignment, labels_b, cost_b); },
       [&] { return labels_a == labels_b ? 0.0 : 1.0; }},
      {"kNN selection", [&] { knn_a = reference::nearest_neighbors(features, 0.9, sigma_s, sigma_l, 20); },
       [&] { knn_b = nearest_neighbors(features, 0.9, sigma_s, sigma_l, 20); },
       [&] { return knn_a == knn_b ? 0.0 : 1.0; }},
      {"propagation (50 steps)", [&] { f_a = reference::propagate(affinity, y, 0.99, kSteps); },
       [&] { f_b = propagate(affinity, y, {0.99, 1e-300, kSteps}).f; },
       [&] { return (f_a - f_b).cwiseAbs().maxCoeff(); }},
  };

  std::FILE* csv = csv_path.empty() ? nullptr : std::fopen(csv_path.c_str(), "w");
  if (csv) std::fprintf(csv, "kernel,variant,threads,median_ms,speedup,max_difference\n");
  std::printf("%-24s %-9s %7s %11s %8s %12s\n", "kernel", "variant", "threads", "median ms", "speedup", "max diff");
  for (const Kernel& kernel : kernels) {
    set_thread_count(1);
    const double base = median_ms(reps, kernel.serial);
    std::printf("%-24s %-9s %7d %11.3f %8.2f %12s\n", kernel.name.c_str(), "reference", 1, base, 1.0, "-");
    if (csv) std::fprintf(csv, "%s,reference,1,%.4f,1,\n", kernel.name.c_str(), base);
    for (int t : threads) {
      set_thread_count(t);
      const double ms = median_ms(reps, kernel.parallel);
      const double diff = kernel.max_difference();
      std::printf("%-24s %-9s %7d %11.3f %8.2f %12.3g\n", kernel.name.c_str(), "openmp", t, ms, base / ms, diff);
      if (csv) std::fprintf(csv, "%s,openmp,%d,%.4f,%.4f,%.6g\n", kernel.name.c_str(), t, ms, base / ms, diff);
    }
  }
  set_thread_count(max_threads);
  if (csv) std::fclose(csv);
  return 0;
}
