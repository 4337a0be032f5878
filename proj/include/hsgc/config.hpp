#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace hsgc {

/// Every tunable of the pipeline. Optional fields are resolved from the
/// data (median heuristics, superpixel count from image size) when unset.
struct PipelineConfig {
  double variance_target = 0.98;
  int max_bands = 0;  // 0 = uncapped
  int cov_window = 5;
  double cov_epsilon_scale = 1e-3;
  std::optional<int> superpixels;
  double compactness = 10.0;
  int max_iters = 10;
  double seg_tol = 1e-3;
  double density_lambda = 4.0;
  double density_gmin = 0.5;
  int density_smoothing = 5;
  std::optional<double> h;
  double beta = 0.9;
  std::optional<double> sigma_s;
  std::optional<double> sigma_l;
  int knn = 20;
  double alpha = 0.99;
  double lgc_tol = 1e-8;
  int lgc_max_iters = 5000;
  int labels_per_class = 10;
  int trials = 1;
  std::uint64_t rng_seed = 0;
  bool include_seeds = false;
  int threads = 0;  // 0 = OpenMP default

  /// Throws ConfigError naming the first out-of-domain key.
  void validate() const;
};

/// Pixels per superpixel used when `superpixels` is unset.
inline constexpr int kPixelsPerSuperpixel = 4;

int resolve_superpixels(const PipelineConfig& config, std::size_t pixel_count);

/// Applies one "key = value" setting; "auto" clears the optional fields.
void apply_setting(PipelineConfig& config, const std::string& key, const std::string& value);

/// Grammar: one "key = value" per line, '#' starts a comment, blank lines
/// ignored. Unknown keys and unparsable values are errors.
PipelineConfig parse_config_text(const std::string& text);
PipelineConfig parse_config(const std::filesystem::path& path);

/// Round-trippable "key = value" dump.
void write_config(const PipelineConfig& config, std::ostream& out);

}  // namespace hsgc
