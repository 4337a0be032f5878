#include "hsgc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "hsgc/error.hpp"

namespace hsgc {
namespace {

constexpr const char* kModule = "graph";

void check_beta(double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw ParameterError(kModule, "beta must lie in [0, 1]");
}

double median_of(std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  double m = *mid;
  if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), mid));
  return m;
}

/// Log of s_ij * l_ij; never underflows, so it ranks even very distant pairs.
double log_weight(const SuperpixelFeatures& f, int i, int j, double beta, double inv_ss, double inv_sl) {
  const double dw = (f.weighted.row(i) - f.weighted.row(j)).squaredNorm();
  const double dm = (f.mean.row(i) - f.mean.row(j)).squaredNorm();
  const double dp = (f.position.row(i) - f.position.row(j)).squaredNorm();
  return ((beta - 1.0) * dw - beta * dm) * inv_ss - dp * inv_sl;
}

}  // namespace

std::vector<int> SimilarityGraph::degrees() const {
  std::vector<int> d(static_cast<std::size_t>(node_count), 0);
  for (const Edge& e : edges) {
    ++d[static_cast<std::size_t>(e.i)];
    ++d[static_cast<std::size_t>(e.j)];
  }
  return d;
}

double spectral_similarity(const Eigen::Ref<const Eigen::RowVectorXd>& weighted_i,
                           const Eigen::Ref<const Eigen::RowVectorXd>& weighted_j,
                           const Eigen::Ref<const Eigen::RowVectorXd>& mean_i,
                           const Eigen::Ref<const Eigen::RowVectorXd>& mean_j, double beta, double sigma_s) {
  check_beta(beta);
  if (!(sigma_s > 0.0)) throw ParameterError(kModule, "sigma_s must be positive");
  const double dw = (weighted_i - weighted_j).squaredNorm();
  const double dm = (mean_i - mean_j).squaredNorm();
  return std::exp(((beta - 1.0) * dw - beta * dm) / (sigma_s * sigma_s));
}

double location_similarity(const Eigen::Ref<const Eigen::RowVectorXd>& pi,
                           const Eigen::Ref<const Eigen::RowVectorXd>& pj, double sigma_l) {
  if (!(sigma_l > 0.0)) throw ParameterError(kModule, "sigma_l must be positive");
  return std::exp(-(pi - pj).squaredNorm() / (sigma_l * sigma_l));
}

std::pair<double, double> kernel_widths(const SuperpixelFeatures& f, const GraphParams& params) {
  check_beta(params.beta);
  if (params.sigma_s && !(*params.sigma_s > 0.0)) throw ParameterError(kModule, "sigma_s must be positive");
  if (params.sigma_l && !(*params.sigma_l > 0.0)) throw ParameterError(kModule, "sigma_l must be positive");
  if (params.sigma_s && params.sigma_l) return {*params.sigma_s, *params.sigma_l};

  const int n = f.count();
  const int keff = std::min(params.k, n - 1);
  std::vector<double> spectral;
  std::vector<double> spatial;
  if (keff > 0) spectral.reserve(static_cast<std::size_t>(n) * keff);
  spatial.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  std::vector<double> ds;
  for (int i = 0; i < n && keff > 0; ++i) {
    ds.clear();
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      ds.push_back((1.0 - params.beta) * (f.weighted.row(i) - f.weighted.row(j)).squaredNorm() +
                   params.beta * (f.mean.row(i) - f.mean.row(j)).squaredNorm());
      if (j > i) spatial.push_back((f.position.row(i) - f.position.row(j)).squaredNorm());
    }
    std::partial_sort(ds.begin(), ds.begin() + keff, ds.end());
    spectral.insert(spectral.end(), ds.begin(), ds.begin() + keff);
  }
  const double ms = median_of(spectral);
  const double ml = median_of(spatial);
  const double ss = params.sigma_s ? *params.sigma_s : (ms > 0.0 ? std::sqrt(ms) : 1.0);
  const double sl = params.sigma_l ? *params.sigma_l : (ml > 0.0 ? std::sqrt(ml) : 1.0);
  return {ss, sl};
}

std::vector<std::vector<int>> nearest_neighbors(const SuperpixelFeatures& f, double beta, double sigma_s,
                                                double sigma_l, int k) {
  const int n = f.count();
  const int keff = std::min(k, n - 1);
  const double inv_ss = 1.0 / (sigma_s * sigma_s);
  const double inv_sl = 1.0 / (sigma_l * sigma_l);
  std::vector<std::vector<int>> picks(static_cast<std::size_t>(n));
  if (keff <= 0) return picks;

#pragma omp parallel for schedule(dynamic, 8)
  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<double, int>> cand;
    cand.reserve(static_cast<std::size_t>(n - 1));
    for (int j = 0; j < n; ++j) {
      if (j != i) cand.emplace_back(log_weight(f, i, j, beta, inv_ss, inv_sl), j);
    }
    const auto order = [](const auto& a, const auto& b) {
      return a.first > b.first || (a.first == b.first && a.second < b.second);
    };
    std::partial_sort(cand.begin(), cand.begin() + keff, cand.end(), order);
    auto& row = picks[static_cast<std::size_t>(i)];
    row.reserve(static_cast<std::size_t>(keff));
    for (int m = 0; m < keff; ++m) row.push_back(cand[static_cast<std::size_t>(m)].second);
  }
  return picks;
}

SimilarityGraph build_graph(const SuperpixelFeatures& f, const GraphParams& params) {
  check_beta(params.beta);
  if (params.k < 1) throw ParameterError(kModule, "k must be >= 1");
  SimilarityGraph g;
  g.node_count = f.count();
  g.beta = params.beta;
  g.k = params.k;
  if (g.node_count < 2) {
    g.degenerate = true;
    return g;
  }
  std::tie(g.sigma_s, g.sigma_l) = kernel_widths(f, params);

  const auto picks = nearest_neighbors(f, g.beta, g.sigma_s, g.sigma_l, params.k);
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < g.node_count; ++i) {
    for (int j : picks[static_cast<std::size_t>(i)]) pairs.emplace_back(std::min(i, j), std::max(i, j));
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  g.edges.reserve(pairs.size());
  for (const auto& [i, j] : pairs) {
    const double s = spectral_similarity(f.weighted.row(i), f.weighted.row(j), f.mean.row(i), f.mean.row(j),
                                         g.beta, g.sigma_s);
    const double l = location_similarity(f.position.row(i), f.position.row(j), g.sigma_l);
    // Keep the weight strictly positive when the product underflows.
    g.edges.push_back({i, j, std::max(s * l, std::numeric_limits<double>::min())});
  }
  return g;
}

void write_graph_csv(const SimilarityGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(kModule, "cannot open '" + path.string() + "' for writing");
  char buf[64];
  for (const Edge& e : graph.edges) {
    std::snprintf(buf, sizeof buf, "%d,%d,%.9g\n", e.i, e.j, e.w);
    out << buf;
  }
  if (!out) throw Error(kModule, "write failed for '" + path.string() + "'");
}

SimilarityGraph read_graph_csv(const std::filesystem::path& path, int node_count) {
  std::ifstream in(path);
  if (!in) throw Error(kModule, "cannot open '" + path.string() + "' for reading");
  SimilarityGraph g;
  g.node_count = node_count;
  g.degenerate = node_count < 2;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    Edge e;
    char c1 = 0;
    char c2 = 0;
    std::istringstream ss(line);
    if (!(ss >> e.i >> c1 >> e.j >> c2 >> e.w) || c1 != ',' || c2 != ',') {
      throw FormatError(kModule, "line " + std::to_string(line_no) + " is not 'i,j,w'");
    }
    if (e.i < 0 || e.j >= node_count || e.i >= e.j || !(e.w > 0.0 && e.w <= 1.0)) {
      throw FormatError(kModule, "line " + std::to_string(line_no) + " violates 0 <= i < j < n, 0 < w <= 1");
    }
    g.edges.push_back(e);
  }
  std::sort(g.edges.begin(), g.edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.i, a.j) < std::tie(b.i, b.j);
  });
  return g;
}

}  // namespace hsgc
