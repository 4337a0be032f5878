#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "hsgc/covfield.hpp"
#include "hsgc/hsi_io.hpp"

namespace hsgc {

struct DensityParams {
  double lambda = 4.0;
  double g_min = 0.5;
  int smoothing = 5;
};

/// Per-pixel search-range multiplier g in [g_min, 1]; small where the
/// log-covariance field changes quickly.
struct DensityField {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<double> g;
  std::vector<double> gradient;  // raw, unsmoothed G

  double at(std::uint32_t x, std::uint32_t y) const { return g[std::size_t{y} * width + x]; }
};

/// Central-difference gradient of the field under the Log-Euclidean
/// distance, with neighbors clamped at the border.
std::vector<double> led_gradient(const LogCovField& field);

DensityField content_density(const LogCovField& field, const DensityParams& params = {});

struct Centroid {
  double x = 0.0;
  double y = 0.0;
  std::vector<double> log_cov;  // packed, see pack_symmetric
  std::size_t member_count = 0;
};

struct SegParams {
  double compactness = 10.0;
  int max_iters = 10;
  double tol = 1e-3;
};

struct SegResult {
  SegMap seg;
  std::vector<Centroid> centroids;
  /// Sum of D^2 after each assignment step.
  std::vector<double> objective_trace;
  int iterations = 0;
};

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

/// sqrt(W * H / K), the nominal superpixel spacing.
double grid_interval(std::uint32_t width, std::uint32_t height, int k);

/// 2 * interval * g at the centroid's rounded position.
double search_range(const Centroid& c, const DensityField& density, double interval);

/// D^2 = d_spec^2 + (m / interval)^2 * d_spat^2, or kUnreachable when the
/// pixel lies farther than `range_limit` from the centroid.
double clustering_distance(double px, double py, std::span<const double> pixel_log, const Centroid& centroid,
                           double range_limit, double compactness, double interval);

/// Assignment sweep used by segment(): each pixel takes the centroid with the
/// smallest (D^2, index) among those in range, plus its `incumbent` centroid
/// (pass an empty span on the first sweep). Pixels with no candidate fall
/// back to the unrestricted nearest centroid. Writes labels and per-pixel D^2.
void assign_pixels(const LogCovField& field, std::span<const Centroid> centroids,
                   std::span<const double> ranges, double compactness, double interval,
                   std::span<const std::int32_t> incumbent, std::span<std::int32_t> labels,
                   std::span<double> cost);

/// Recomputes every centroid as the mean position and mean packed log of its
/// members. Centroids without members keep their previous values.
void update_centroids(const LogCovField& field, std::span<const std::int32_t> labels,
                      std::vector<Centroid>& centroids);

/// Relabels so that every superpixel is one 4-connected component: smaller
/// components are merged into the neighbor sharing the longest border, then
/// empty labels are dropped and indices compacted in order.
SegMap enforce_connectivity(const SegMap& seg);

SegResult segment(const LogCovField& field, int k, const DensityField& density, const SegParams& params = {});

/// Every pixel labeled in 0..count-1 and every label used.
bool is_partition(const SegMap& seg);
/// Every label's pixel set is one 4-connected component.
bool is_four_connected(const SegMap& seg);

}  // namespace hsgc
