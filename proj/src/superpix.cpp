#include "hsgc/superpix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "hsgc/error.hpp"

namespace hsgc {
namespace {

constexpr const char* kModule = "superpix";

/// Mean over a window x window box clamped to the image.
std::vector<double> box_mean(std::span<const double> in, std::uint32_t w, std::uint32_t h, int window) {
  const int half = window / 2;
  std::vector<double> rows(in.size());
  for (std::uint32_t y = 0; y < h; ++y) {
    for (std::uint32_t x = 0; x < w; ++x) {
      const int x0 = std::max(0, static_cast<int>(x) - half);
      const int x1 = std::min(static_cast<int>(w) - 1, static_cast<int>(x) + half);
      double s = 0.0;
      for (int xx = x0; xx <= x1; ++xx) s += in[std::size_t{y} * w + xx];
      rows[std::size_t{y} * w + x] = s;
    }
  }
  std::vector<double> out(in.size());
  for (std::uint32_t y = 0; y < h; ++y) {
    const int y0 = std::max(0, static_cast<int>(y) - half);
    const int y1 = std::min(static_cast<int>(h) - 1, static_cast<int>(y) + half);
    for (std::uint32_t x = 0; x < w; ++x) {
      const int x0 = std::max(0, static_cast<int>(x) - half);
      const int x1 = std::min(static_cast<int>(w) - 1, static_cast<int>(x) + half);
      double s = 0.0;
      for (int yy = y0; yy <= y1; ++yy) s += rows[std::size_t(yy) * w + x];
      out[std::size_t{y} * w + x] = s / static_cast<double>((x1 - x0 + 1) * (y1 - y0 + 1));
    }
  }
  return out;
}

struct Components {
  std::vector<std::int32_t> id;  // per pixel
  std::vector<std::vector<std::size_t>> pixels;
  std::vector<std::int32_t> label;
};

Components label_components(std::span<const std::int32_t> labels, std::uint32_t w, std::uint32_t h) {
  Components comps;
  comps.id.assign(labels.size(), -1);
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < labels.size(); ++start) {
    if (comps.id[start] >= 0) continue;
    const auto cid = static_cast<std::int32_t>(comps.pixels.size());
    const std::int32_t lab = labels[start];
    std::vector<std::size_t> members;
    comps.id[start] = cid;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      members.push_back(p);
      const std::uint32_t x = static_cast<std::uint32_t>(p % w);
      const std::uint32_t y = static_cast<std::uint32_t>(p / w);
      const auto visit = [&](std::size_t q) {
        if (comps.id[q] < 0 && labels[q] == lab) {
          comps.id[q] = cid;
          stack.push_back(q);
        }
      };
      if (x > 0) visit(p - 1);
      if (x + 1 < w) visit(p + 1);
      if (y > 0) visit(p - w);
      if (y + 1 < h) visit(p + w);
    }
    std::sort(members.begin(), members.end());
    comps.pixels.push_back(std::move(members));
    comps.label.push_back(lab);
  }
  return comps;
}

}  // namespace

std::vector<double> led_gradient(const LogCovField& field) {
  const std::uint32_t w = field.width;
  const std::uint32_t h = field.height;
  std::vector<double> grad(field.pixel_count());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(grad.size()); ++p) {
    const auto x = static_cast<std::uint32_t>(p % w);
    const auto y = static_cast<std::uint32_t>(p / w);
    const std::uint32_t xl = x > 0 ? x - 1 : 0;
    const std::uint32_t xr = std::min(w - 1, x + 1);
    const std::uint32_t yu = y > 0 ? y - 1 : 0;
    const std::uint32_t yd = std::min(h - 1, y + 1);
    grad[static_cast<std::size_t>(p)] = std::sqrt(packed_distance_sq(field.at(xr, y), field.at(xl, y))) +
                                        std::sqrt(packed_distance_sq(field.at(x, yd), field.at(x, yu)));
  }
  return grad;
}

DensityField content_density(const LogCovField& field, const DensityParams& params) {
  if (params.smoothing < 1 || params.smoothing % 2 == 0) {
    throw ParameterError(kModule, "density smoothing must be an odd count >= 1");
  }
  if (!(params.lambda >= 0.0)) throw ParameterError(kModule, "density lambda must be non-negative");
  if (!(params.g_min > 0.0 && params.g_min <= 1.0)) throw ParameterError(kModule, "density g_min must lie in (0, 1]");

  DensityField density;
  density.width = field.width;
  density.height = field.height;
  density.gradient = led_gradient(field);
  const std::vector<double> smooth = box_mean(density.gradient, field.width, field.height, params.smoothing);

  std::vector<double> sorted = smooth;
  const std::size_t rank = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(sorted.size())));
  const std::size_t idx = std::min(sorted.size() - 1, rank > 0 ? rank - 1 : 0);
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(idx), sorted.end());
  double scale = sorted[idx];
  if (!(scale > 0.0)) scale = *std::max_element(smooth.begin(), smooth.end());

  density.g.resize(smooth.size());
  for (std::size_t p = 0; p < smooth.size(); ++p) {
    const double normalized = scale > 0.0 ? std::min(1.0, smooth[p] / scale) : 0.0;
    density.g[p] = std::max(params.g_min, 1.0 / (1.0 + params.lambda * normalized));
  }
  return density;
}

double grid_interval(std::uint32_t width, std::uint32_t height, int k) {
  return std::sqrt(static_cast<double>(width) * height / k);
}

double search_range(const Centroid& c, const DensityField& density, double interval) {
  const auto x = static_cast<std::uint32_t>(std::clamp(std::lround(c.x), 0L, static_cast<long>(density.width) - 1));
  const auto y = static_cast<std::uint32_t>(std::clamp(std::lround(c.y), 0L, static_cast<long>(density.height) - 1));
  return 2.0 * interval * density.at(x, y);
}

double clustering_distance(double px, double py, std::span<const double> pixel_log, const Centroid& centroid,
                           double range_limit, double compactness, double interval) {
  const double dx = px - centroid.x;
  const double dy = py - centroid.y;
  const double spatial_sq = dx * dx + dy * dy;
  if (std::sqrt(spatial_sq) > range_limit) return kUnreachable;
  const double weight = compactness / interval;
  return packed_distance_sq(pixel_log, centroid.log_cov) + weight * weight * spatial_sq;
}

void assign_pixels(const LogCovField& field, std::span<const Centroid> centroids,
                   std::span<const double> ranges, double compactness, double interval,
                   std::span<const std::int32_t> incumbent, std::span<std::int32_t> labels,
                   std::span<double> cost) {
  const std::uint32_t w = field.width;
  const std::uint32_t h = field.height;
  const double weight_sq = (compactness / interval) * (compactness / interval);

  // Bucket centroids on a grid no finer than the widest search range so each
  // pixel only inspects its own and the 8 surrounding cells.
  const double widest = std::max(1.0, *std::max_element(ranges.begin(), ranges.end()));
  const double cell = std::ceil(widest);
  const int cols = static_cast<int>(std::ceil(w / cell)) + 1;
  const int rows = static_cast<int>(std::ceil(h / cell)) + 1;
  std::vector<std::vector<std::int32_t>> buckets(static_cast<std::size_t>(cols) * rows);
  for (std::size_t i = 0; i < centroids.size(); ++i) {
    const int cx = std::clamp(static_cast<int>(std::floor(centroids[i].x / cell)), 0, cols - 1);
    const int cy = std::clamp(static_cast<int>(std::floor(centroids[i].y / cell)), 0, rows - 1);
    buckets[static_cast<std::size_t>(cy) * cols + cx].push_back(static_cast<std::int32_t>(i));
  }

  const auto full_cost = [&](std::size_t p, double px, double py, std::size_t i) {
    const double dx = px - centroids[i].x;
    const double dy = py - centroids[i].y;
    return packed_distance_sq(field.at(p), centroids[i].log_cov) + weight_sq * (dx * dx + dy * dy);
  };

#pragma omp parallel for schedule(dynamic, 256)
  for (std::ptrdiff_t pi = 0; pi < static_cast<std::ptrdiff_t>(field.pixel_count()); ++pi) {
    const auto p = static_cast<std::size_t>(pi);
    const double px = static_cast<double>(p % w);
    const double py = static_cast<double>(p / w);
    double best = kUnreachable;
    std::int32_t best_index = -1;
    const auto consider = [&](std::int32_t i, double d) {
      if (d < best || (d == best && i < best_index)) {
        best = d;
        best_index = i;
      }
    };

    const int cx = static_cast<int>(px / cell);
    const int cy = static_cast<int>(py / cell);
    for (int by = std::max(0, cy - 1); by <= std::min(rows - 1, cy + 1); ++by) {
      for (int bx = std::max(0, cx - 1); bx <= std::min(cols - 1, cx + 1); ++bx) {
        for (std::int32_t i : buckets[static_cast<std::size_t>(by) * cols + bx]) {
          const auto& c = centroids[static_cast<std::size_t>(i)];
          const double dx = px - c.x;
          const double dy = py - c.y;
          if (std::sqrt(dx * dx + dy * dy) > ranges[static_cast<std::size_t>(i)]) continue;
          consider(i, full_cost(p, px, py, static_cast<std::size_t>(i)));
        }
      }
    }
    if (!incumbent.empty() && incumbent[p] >= 0) {
      consider(incumbent[p], full_cost(p, px, py, static_cast<std::size_t>(incumbent[p])));
    }
    if (best_index < 0) {
      for (std::size_t i = 0; i < centroids.size(); ++i) {
        consider(static_cast<std::int32_t>(i), full_cost(p, px, py, i));
      }
    }
    labels[p] = best_index;
    cost[p] = best;
  }
}

void update_centroids(const LogCovField& field, std::span<const std::int32_t> labels,
                      std::vector<Centroid>& centroids) {
  const std::size_t k = centroids.size();
  std::vector<std::size_t> offset(k + 1, 0);
  for (std::int32_t l : labels) ++offset[static_cast<std::size_t>(l) + 1];
  std::partial_sum(offset.begin(), offset.end(), offset.begin());
  std::vector<std::size_t> members(labels.size());
  {
    std::vector<std::size_t> fill(offset.begin(), offset.end() - 1);
    for (std::size_t p = 0; p < labels.size(); ++p) members[fill[static_cast<std::size_t>(labels[p])]++] = p;
  }

  const std::size_t stride = static_cast<std::size_t>(field.stride);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(k); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    Centroid& c = centroids[i];
    const std::size_t n = offset[i + 1] - offset[i];
    c.member_count = n;
    if (n == 0) continue;
    double sx = 0.0;
    double sy = 0.0;
    // Accumulate offsets from the first member so a constant field averages
    // to exactly its value.
    const auto base = field.at(members[offset[i]]);
    std::vector<double> sum(stride, 0.0);
    for (std::size_t m = offset[i]; m < offset[i + 1]; ++m) {
      const std::size_t p = members[m];
      sx += static_cast<double>(p % field.width);
      sy += static_cast<double>(p / field.width);
      const auto log = field.at(p);
      for (std::size_t j = 0; j < stride; ++j) sum[j] += log[j] - base[j];
    }
    const double nd = static_cast<double>(n);
    c.x = sx / nd;
    c.y = sy / nd;
    c.log_cov.resize(stride);
    for (std::size_t j = 0; j < stride; ++j) c.log_cov[j] = base[j] + sum[j] / nd;
  }
}

SegMap enforce_connectivity(const SegMap& seg) {
  const std::uint32_t w = seg.width;
  const std::uint32_t h = seg.height;
  std::vector<std::int32_t> labels = seg.assignment;

  while (true) {
    const Components comps = label_components(labels, w, h);
    std::vector<std::int32_t> main_comp(static_cast<std::size_t>(seg.count), -1);
    for (std::size_t c = 0; c < comps.pixels.size(); ++c) {
      auto& best = main_comp[static_cast<std::size_t>(comps.label[c])];
      if (best < 0 || comps.pixels[c].size() > comps.pixels[static_cast<std::size_t>(best)].size()) {
        best = static_cast<std::int32_t>(c);
      }
    }
    std::vector<std::size_t> orphans;
    for (std::size_t c = 0; c < comps.pixels.size(); ++c) {
      if (main_comp[static_cast<std::size_t>(comps.label[c])] != static_cast<std::int32_t>(c)) orphans.push_back(c);
    }
    if (orphans.empty()) break;
    std::stable_sort(orphans.begin(), orphans.end(), [&](std::size_t a, std::size_t b) {
      return comps.pixels[a].size() < comps.pixels[b].size();
    });

    bool changed = false;
    std::vector<std::pair<std::int32_t, std::size_t>> border;
    for (std::size_t c : orphans) {
      const std::int32_t own = comps.label[c];
      border.clear();
      const auto count = [&](std::size_t q) {
        const std::int32_t l = labels[q];
        if (l == own) return;
        auto it = std::find_if(border.begin(), border.end(), [&](const auto& e) { return e.first == l; });
        if (it == border.end()) {
          border.emplace_back(l, 1);
        } else {
          ++it->second;
        }
      };
      for (std::size_t p : comps.pixels[c]) {
        const std::uint32_t x = static_cast<std::uint32_t>(p % w);
        const std::uint32_t y = static_cast<std::uint32_t>(p / w);
        if (x > 0) count(p - 1);
        if (x + 1 < w) count(p + 1);
        if (y > 0) count(p - w);
        if (y + 1 < h) count(p + w);
      }
      if (border.empty()) continue;
      const auto target = std::min_element(border.begin(), border.end(), [](const auto& a, const auto& b) {
        return std::tie(b.second, a.first) < std::tie(a.second, b.first);
      });
      for (std::size_t p : comps.pixels[c]) labels[p] = target->first;
      changed = true;
    }
    if (!changed) throw Error(kModule, "connectivity repair made no progress");
  }

  std::vector<std::int32_t> remap(static_cast<std::size_t>(seg.count), -1);
  for (std::int32_t l : labels) remap[static_cast<std::size_t>(l)] = 0;
  std::int32_t next = 0;
  for (auto& r : remap) {
    if (r == 0) r = next++;
  }
  SegMap out;
  out.width = w;
  out.height = h;
  out.count = next;
  out.assignment.resize(labels.size());
  for (std::size_t p = 0; p < labels.size(); ++p) out.assignment[p] = remap[static_cast<std::size_t>(labels[p])];
  return out;
}

SegResult segment(const LogCovField& field, int k, const DensityField& density, const SegParams& params) {
  const std::uint32_t w = field.width;
  const std::uint32_t h = field.height;
  if (k < 1 || static_cast<std::size_t>(k) > field.pixel_count()) {
    throw ParameterError(kModule, "superpixel count " + std::to_string(k) + " outside 1.." +
                                      std::to_string(field.pixel_count()));
  }
  if (density.width != w || density.height != h) throw ParameterError(kModule, "density field size mismatch");
  if (!(params.compactness > 0.0)) throw ParameterError(kModule, "compactness must be positive");
  if (params.max_iters < 1) throw ParameterError(kModule, "max_iters must be >= 1");

  const double interval = grid_interval(w, h, k);
  int nx = std::max(1L, std::lround(w / interval));
  int ny = std::max(1L, std::lround(h / interval));
  nx = std::min<int>(nx, static_cast<int>(w));
  ny = std::min<int>(ny, static_cast<int>(h));
  while (nx * ny > k) {
    if (nx >= ny && nx > 1) {
      --nx;
    } else {
      --ny;
    }
  }

  // Grid seeds, each nudged to the lowest-gradient free pixel of its 3x3
  // neighborhood.
  std::vector<char> taken(field.pixel_count(), 0);
  std::vector<Centroid> centroids;
  centroids.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const auto sx = static_cast<std::uint32_t>((i + 0.5) * w / nx);
      const auto sy = static_cast<std::uint32_t>((j + 0.5) * h / ny);
      std::uint32_t bx = sx;
      std::uint32_t by = sy;
      const std::size_t home = std::size_t{sy} * w + sx;
      double best = taken[home] ? kUnreachable : density.gradient[home];
      for (std::uint32_t y = sy > 0 ? sy - 1 : 0; y <= std::min(h - 1, sy + 1); ++y) {
        for (std::uint32_t x = sx > 0 ? sx - 1 : 0; x <= std::min(w - 1, sx + 1); ++x) {
          const std::size_t q = std::size_t{y} * w + x;
          if (!taken[q] && density.gradient[q] < best) {
            best = density.gradient[q];
            bx = x;
            by = y;
          }
        }
      }
      if (taken[std::size_t{by} * w + bx]) {
        // Whole neighborhood already seeded: take the nearest free pixel.
        double nearest = kUnreachable;
        for (std::size_t q = 0; q < taken.size(); ++q) {
          if (taken[q]) continue;
          const double dx = static_cast<double>(q % w) - sx;
          const double dy = static_cast<double>(q / w) - sy;
          if (dx * dx + dy * dy < nearest) {
            nearest = dx * dx + dy * dy;
            bx = static_cast<std::uint32_t>(q % w);
            by = static_cast<std::uint32_t>(q / w);
          }
        }
      }
      taken[std::size_t{by} * w + bx] = 1;
      Centroid c;
      c.x = bx;
      c.y = by;
      const auto log = field.at(bx, by);
      c.log_cov.assign(log.begin(), log.end());
      centroids.push_back(std::move(c));
    }
  }

  SegResult result;
  std::vector<std::int32_t> labels(field.pixel_count(), -1);
  std::vector<std::int32_t> previous;
  std::vector<double> cost(field.pixel_count(), 0.0);
  std::vector<double> ranges(centroids.size());
  for (int it = 0; it < params.max_iters; ++it) {
    for (std::size_t i = 0; i < centroids.size(); ++i) ranges[i] = search_range(centroids[i], density, interval);
    assign_pixels(field, centroids, ranges, params.compactness, interval, previous, labels, cost);
    const double objective = std::accumulate(cost.begin(), cost.end(), 0.0);
    result.objective_trace.push_back(objective);
    result.iterations = it + 1;
    if (objective == 0.0) break;
    if (it > 0) {
      const double prior = result.objective_trace[result.objective_trace.size() - 2];
      if ((prior - objective) < params.tol * prior) break;
    }
    update_centroids(field, labels, centroids);
    previous = labels;
  }

  SegMap raw;
  raw.width = w;
  raw.height = h;
  raw.count = static_cast<int>(centroids.size());
  raw.assignment = std::move(labels);
  result.seg = enforce_connectivity(raw);

  result.centroids.assign(static_cast<std::size_t>(result.seg.count), Centroid{});
  update_centroids(field, result.seg.assignment, result.centroids);
  return result;
}

bool is_partition(const SegMap& seg) {
  if (seg.assignment.size() != seg.pixel_count() || seg.count < 1) return false;
  std::vector<char> used(static_cast<std::size_t>(seg.count), 0);
  for (std::int32_t l : seg.assignment) {
    if (l < 0 || l >= seg.count) return false;
    used[static_cast<std::size_t>(l)] = 1;
  }
  return std::all_of(used.begin(), used.end(), [](char u) { return u != 0; });
}

bool is_four_connected(const SegMap& seg) {
  const Components comps = label_components(seg.assignment, seg.width, seg.height);
  std::vector<int> per_label(static_cast<std::size_t>(seg.count), 0);
  for (std::int32_t l : comps.label) {
    if (++per_label[static_cast<std::size_t>(l)] > 1) return false;
  }
  return true;
}

}  // namespace hsgc
