#include "hsgc/reference.hpp"

#include <algorithm>
#include <cmath>

#include "hsgc/graph.hpp"

namespace hsgc::reference {

Eigen::MatrixXd sample_covariance(const HsiCube& cube, const Eigen::VectorXd& mean) {
  const int b = static_cast<int>(cube.bands);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(b, b);
  for (std::size_t p = 0; p < cube.pixel_count(); ++p) {
    const auto px = cube.pixel(p);
    for (int i = 0; i < b; ++i) {
      for (int j = 0; j < b; ++j) cov(i, j) += (px[i] - mean[i]) * (px[j] - mean[j]);
    }
  }
  return cov / static_cast<double>(cube.pixel_count() - 1);
}

LogCovField build_log_cov_field(const HsiCube& reduced, int window, double epsilon) {
  LogCovField field;
  field.width = reduced.width;
  field.height = reduced.height;
  field.dim = static_cast<int>(reduced.bands);
  field.stride = packed_size(field.dim);
  field.logs.assign(field.pixel_count() * field.stride, 0.0);
  const int dim = field.dim;
  const int half = window / 2;
  const int w = static_cast<int>(reduced.width);
  const int h = static_cast<int>(reduced.height);

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::vector<double> mean(static_cast<std::size_t>(dim), 0.0);
      int n = 0;
      for (int yy = std::max(0, y - half); yy <= std::min(h - 1, y + half); ++yy) {
        for (int xx = std::max(0, x - half); xx <= std::min(w - 1, x + half); ++xx) {
          const auto px = reduced.pixel(static_cast<std::uint32_t>(xx), static_cast<std::uint32_t>(yy));
          for (int a = 0; a < dim; ++a) mean[static_cast<std::size_t>(a)] += px[a];
          ++n;
        }
      }
      for (double& m : mean) m /= n;
      Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
      for (int yy = std::max(0, y - half); yy <= std::min(h - 1, y + half); ++yy) {
        for (int xx = std::max(0, x - half); xx <= std::min(w - 1, x + half); ++xx) {
          const auto px = reduced.pixel(static_cast<std::uint32_t>(xx), static_cast<std::uint32_t>(yy));
          for (int i = 0; i < dim; ++i) {
            for (int j = 0; j < dim; ++j) {
              cov(i, j) += (px[i] - mean[static_cast<std::size_t>(i)]) * (px[j] - mean[static_cast<std::size_t>(j)]);
            }
          }
        }
      }
      if (n > 1) cov /= (n - 1);
      for (int i = 0; i < dim; ++i) cov(i, i) += epsilon;
      pack_symmetric(matrix_log(cov), field.at(static_cast<std::size_t>(y) * w + x));
    }
  }
  return field;
}

void assign_pixels(const LogCovField& field, std::span<const Centroid> centroids, std::span<const double> ranges,
                   double compactness, double interval, std::span<const std::int32_t> incumbent,
                   std::span<std::int32_t> labels, std::span<double> cost) {
  const int w = static_cast<int>(field.width);
  const int h = static_cast<int>(field.height);
  std::fill(labels.begin(), labels.end(), -1);
  std::fill(cost.begin(), cost.end(), kUnreachable);

  const auto offer = [&](std::size_t p, std::int32_t i, double d) {
    if (d < cost[p] || (d == cost[p] && (labels[p] < 0 || i < labels[p]))) {
      cost[p] = d;
      labels[p] = i;
    }
  };
  for (std::size_t i = 0; i < centroids.size(); ++i) {
    const Centroid& c = centroids[i];
    const double r = ranges[i];
    const int x0 = std::max(0, static_cast<int>(std::floor(c.x - r)));
    const int x1 = std::min(w - 1, static_cast<int>(std::ceil(c.x + r)));
    const int y0 = std::max(0, static_cast<int>(std::floor(c.y - r)));
    const int y1 = std::min(h - 1, static_cast<int>(std::ceil(c.y + r)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const std::size_t p = static_cast<std::size_t>(y) * w + x;
        const double d = clustering_distance(x, y, field.at(p), c, r, compactness, interval);
        if (d != kUnreachable) offer(p, static_cast<std::int32_t>(i), d);
      }
    }
  }
  for (std::size_t p = 0; p < field.pixel_count(); ++p) {
    const double px = static_cast<double>(p % field.width);
    const double py = static_cast<double>(p / field.width);
    if (!incumbent.empty() && incumbent[p] >= 0) {
      const auto i = incumbent[p];
      offer(p, i, clustering_distance(px, py, field.at(p), centroids[static_cast<std::size_t>(i)], kUnreachable,
                                      compactness, interval));
    }
    if (labels[p] < 0) {
      for (std::size_t i = 0; i < centroids.size(); ++i) {
        offer(p, static_cast<std::int32_t>(i),
              clustering_distance(px, py, field.at(p), centroids[i], kUnreachable, compactness, interval));
      }
    }
  }
}

std::vector<std::vector<int>> nearest_neighbors(const SuperpixelFeatures& f, double beta, double sigma_s,
                                                double sigma_l, int k) {
  const int n = f.count();
  const int keff = std::min(k, n - 1);
  std::vector<std::vector<int>> picks(static_cast<std::size_t>(n));
  for (int i = 0; i < n && keff > 0; ++i) {
    std::vector<std::pair<double, int>> all;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double s = spectral_similarity(f.weighted.row(i), f.weighted.row(j), f.mean.row(i), f.mean.row(j), beta,
                                           sigma_s);
      const double l = location_similarity(f.position.row(i), f.position.row(j), sigma_l);
      all.emplace_back(-s * l, j);
    }
    std::sort(all.begin(), all.end());
    for (int m = 0; m < keff; ++m) picks[static_cast<std::size_t>(i)].push_back(all[static_cast<std::size_t>(m)].second);
  }
  return picks;
}

LabelMatrix propagate(const SparseOperator& s, const LabelMatrix& y, double alpha, int steps) {
  const Eigen::MatrixXd dense = s.dense();
  Eigen::MatrixXd f = y;
  for (int t = 0; t < steps; ++t) f = alpha * dense * f + (1.0 - alpha) * Eigen::MatrixXd(y);
  return f;
}

}  // namespace hsgc::reference
