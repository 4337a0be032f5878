#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <vector>

#include "hsgc/hsi_io.hpp"

namespace hsgc {

using Adjacency = std::vector<std::vector<int>>;

/// One row per superpixel.
struct SuperpixelFeatures {
  Eigen::MatrixXd mean;      // K' x A
  Eigen::MatrixXd weighted;  // K' x A
  Eigen::MatrixXd position;  // K' x 2, (x, y)
  Adjacency adjacency;
  double h = 1.0;

  int count() const { return static_cast<int>(mean.rows()); }
};

Eigen::MatrixXd mean_features(const HsiCube& reduced, const SegMap& seg);

/// 4-neighborhood adjacency between superpixels, each list sorted ascending.
Adjacency adjacency(const SegMap& seg);

/// Normalized exp(-||m_z - m_i||^2 / h) weights of superpixel i over its
/// neighbors, in adjacency order. Empty when i has no neighbors.
std::vector<double> neighbor_weights(const Eigen::MatrixXd& means, const Adjacency& adj, int i, double h);

/// Adjacency-weighted neighbor means; an isolated superpixel keeps its own
/// mean.
Eigen::MatrixXd weighted_features(const Eigen::MatrixXd& means, const Adjacency& adj, double h);

Eigen::MatrixXd centroid_positions(const SegMap& seg);

/// Median squared mean-feature distance over adjacent pairs; 1 when there
/// are no pairs or the median is zero.
double median_neighbor_distance(const Eigen::MatrixXd& means, const Adjacency& adj);

SuperpixelFeatures extract_features(const HsiCube& reduced, const SegMap& seg, std::optional<double> h = {});

/// CSV: index,x,y,mean_1..mean_A,weighted_1..weighted_A with a header row.
/// Adjacency and h are not stored.
void write_features_csv(const SuperpixelFeatures& features, const std::filesystem::path& path);
SuperpixelFeatures read_features_csv(const std::filesystem::path& path);

}  // namespace hsgc
