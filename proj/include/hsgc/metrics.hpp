#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hsgc/hsi_io.hpp"

namespace hsgc {

struct EvalReport {
  /// c x c counts, rows = ground truth class, columns = predicted class
  /// (both 1-based class l stored at index l - 1).
  std::vector<std::vector<std::int64_t>> confusion;
  /// Per ground-truth class, pixels predicted 0 (unclassified).
  std::vector<std::int64_t> unclassified;
  double oa = 0.0;
  double aa = 0.0;
  double kappa = 0.0;
  std::int64_t evaluated_pixels = 0;
  std::int64_t excluded_seed_pixels = 0;
  /// Ground-truth classes left out of AA because no pixel was evaluated.
  std::vector<int> skipped_classes;
};

/// OA, AA and kappa from counts; `unclassified` may be empty.
EvalReport report_from_confusion(std::vector<std::vector<std::int64_t>> confusion,
                                 std::vector<std::int64_t> unclassified = {});

/// Evaluates pixels with truth != 0 and, unless include_seeds, seed == 0.
EvalReport evaluate(const LabelMap& pred, const LabelMap& truth, const LabelMap& seeds, bool include_seeds = false);

struct SeedSample {
  LabelMap seeds;
  /// Classes with fewer than per_class pixels; fully seeded.
  std::vector<int> short_classes;
};

SeedSample sample_seeds(const LabelMap& truth, int per_class, std::uint64_t rng_seed);

struct MetricStat {
  double mean = 0.0;
  double std = 0.0;
};

struct TrialSummary {
  int trials = 0;
  MetricStat oa;
  MetricStat aa;
  MetricStat kappa;
};

TrialSummary summarize(std::span<const EvalReport> reports);

/// Fraction of ground-truth boundary pixels that have a predicted boundary
/// pixel within Chebyshev distance `tolerance`. A pixel is a boundary pixel
/// when one of its 4-neighbors carries a different label. Returns 1 when the
/// ground truth has no boundary.
double boundary_recall(std::span<const std::int32_t> truth, std::span<const std::int32_t> pred,
                       std::uint32_t width, std::uint32_t height, int tolerance);

/// "key: value" lines.
void write_report(const EvalReport& report, std::ostream& out);
void write_summary(const TrialSummary& summary, std::ostream& out);
/// One CSV row per trial: trial,oa,aa,kappa,evaluated,excluded_seeds
void write_trials_csv(std::span<const EvalReport> reports, std::ostream& out);

}  // namespace hsgc
