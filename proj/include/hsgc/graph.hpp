#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <vector>

#include "hsgc/features.hpp"

namespace hsgc {

struct GraphParams {
  double beta = 0.9;
  std::optional<double> sigma_s;  // median heuristic when unset
  std::optional<double> sigma_l;
  int k = 20;
};

struct Edge {
  int i = 0;
  int j = 0;  // i < j
  double w = 0.0;
};

struct SimilarityGraph {
  int node_count = 0;
  std::vector<Edge> edges;  // sorted by (i, j)
  double beta = 0.9;
  double sigma_s = 1.0;
  double sigma_l = 1.0;
  int k = 0;
  /// Set when fewer than two nodes leave nothing to connect.
  bool degenerate = false;

  std::vector<int> degrees() const;
};

/// exp(((beta - 1) ||dw||^2 - beta ||dm||^2) / sigma_s^2)
double spectral_similarity(const Eigen::Ref<const Eigen::RowVectorXd>& weighted_i,
                           const Eigen::Ref<const Eigen::RowVectorXd>& weighted_j,
                           const Eigen::Ref<const Eigen::RowVectorXd>& mean_i,
                           const Eigen::Ref<const Eigen::RowVectorXd>& mean_j, double beta, double sigma_s);

/// exp(-||pi - pj||^2 / sigma_l^2)
double location_similarity(const Eigen::Ref<const Eigen::RowVectorXd>& pi,
                           const Eigen::Ref<const Eigen::RowVectorXd>& pj, double sigma_l);

/// Resolved kernel widths, square roots of two medians unless overridden:
/// sigma_s from (1 - beta) ||dw||^2 + beta ||dm||^2 pooled over each node's
/// k_eff smallest values (a local spectral scale), sigma_l from ||dp||^2 over
/// all node pairs (a global spatial scale). Each falls back to 1 when zero.
std::pair<double, double> kernel_widths(const SuperpixelFeatures& features, const GraphParams& params);

/// For each node, the k_eff other nodes with the largest s * l, ties to the
/// lower index. Row i lists node i's picks in decreasing weight order.
std::vector<std::vector<int>> nearest_neighbors(const SuperpixelFeatures& features, double beta, double sigma_s,
                                                double sigma_l, int k);

SimilarityGraph build_graph(const SuperpixelFeatures& features, const GraphParams& params = {});

/// "i,j,w" lines with i < j and 9 significant digits.
void write_graph_csv(const SimilarityGraph& graph, const std::filesystem::path& path);
SimilarityGraph read_graph_csv(const std::filesystem::path& path, int node_count);

}  // namespace hsgc
