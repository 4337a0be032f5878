#include "hsgc/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "hsgc/error.hpp"

namespace hsgc {
namespace {

constexpr const char* kModule = "features";

void check_match(const HsiCube& cube, const SegMap& seg) {
  if (cube.width != seg.width || cube.height != seg.height) {
    throw ParameterError(kModule, "segmentation and cube differ in size");
  }
}

}  // namespace

Eigen::MatrixXd mean_features(const HsiCube& reduced, const SegMap& seg) {
  check_match(reduced, seg);
  const int bands = static_cast<int>(reduced.bands);
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(seg.count, bands);
  Eigen::VectorXd n = Eigen::VectorXd::Zero(seg.count);
  for (std::size_t p = 0; p < seg.pixel_count(); ++p) {
    const int i = seg.assignment[p];
    const auto px = reduced.pixel(p);
    for (int a = 0; a < bands; ++a) sum(i, a) += px[a];
    n[i] += 1.0;
  }
  for (int i = 0; i < seg.count; ++i) sum.row(i) /= n[i];
  return sum;
}

Adjacency adjacency(const SegMap& seg) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(seg.count));
  const auto link = [&](int a, int b) {
    if (a == b) return;
    adj[static_cast<std::size_t>(a)].push_back(b);
    adj[static_cast<std::size_t>(b)].push_back(a);
  };
  for (std::uint32_t y = 0; y < seg.height; ++y) {
    for (std::uint32_t x = 0; x < seg.width; ++x) {
      const std::size_t p = std::size_t{y} * seg.width + x;
      if (x + 1 < seg.width) link(seg.assignment[p], seg.assignment[p + 1]);
      if (y + 1 < seg.height) link(seg.assignment[p], seg.assignment[p + seg.width]);
    }
  }
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return adj;
}

std::vector<double> neighbor_weights(const Eigen::MatrixXd& means, const Adjacency& adj, int i, double h) {
  if (!(h > 0.0)) throw ParameterError(kModule, "h must be positive");
  const auto& z = adj[static_cast<std::size_t>(i)];
  std::vector<double> d(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) d[j] = (means.row(z[j]) - means.row(i)).squaredNorm();
  if (d.empty()) return d;
  // Shifting every exponent by the smallest distance leaves the normalized
  // weights unchanged and keeps the largest term at exp(0).
  const double shift = *std::min_element(d.begin(), d.end());
  double total = 0.0;
  for (double& v : d) {
    v = std::exp(-(v - shift) / h);
    total += v;
  }
  for (double& v : d) v /= total;
  return d;
}

Eigen::MatrixXd weighted_features(const Eigen::MatrixXd& means, const Adjacency& adj, double h) {
  if (!(h > 0.0)) throw ParameterError(kModule, "h must be positive");
  Eigen::MatrixXd out(means.rows(), means.cols());
#pragma omp parallel for schedule(dynamic, 32)
  for (Eigen::Index i = 0; i < means.rows(); ++i) {
    const auto& z = adj[static_cast<std::size_t>(i)];
    if (z.empty()) {
      out.row(i) = means.row(i);
      continue;
    }
    const std::vector<double> weights = neighbor_weights(means, adj, static_cast<int>(i), h);
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(means.cols());
    for (std::size_t j = 0; j < z.size(); ++j) acc += weights[j] * means.row(z[j]);
    out.row(i) = acc;
  }
  return out;
}

Eigen::MatrixXd centroid_positions(const SegMap& seg) {
  Eigen::MatrixXd pos = Eigen::MatrixXd::Zero(seg.count, 2);
  Eigen::VectorXd n = Eigen::VectorXd::Zero(seg.count);
  for (std::size_t p = 0; p < seg.pixel_count(); ++p) {
    const int i = seg.assignment[p];
    pos(i, 0) += static_cast<double>(p % seg.width);
    pos(i, 1) += static_cast<double>(p / seg.width);
    n[i] += 1.0;
  }
  for (int i = 0; i < seg.count; ++i) pos.row(i) /= n[i];
  return pos;
}

double median_neighbor_distance(const Eigen::MatrixXd& means, const Adjacency& adj) {
  std::vector<double> d;
  for (std::size_t i = 0; i < adj.size(); ++i) {
    for (int j : adj[i]) {
      if (static_cast<std::size_t>(j) > i) d.push_back((means.row(j) - means.row(static_cast<Eigen::Index>(i))).squaredNorm());
    }
  }
  if (d.empty()) return 1.0;
  const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  double median = *mid;
  if (d.size() % 2 == 0) median = 0.5 * (median + *std::max_element(d.begin(), mid));
  return median > 0.0 ? median : 1.0;
}

SuperpixelFeatures extract_features(const HsiCube& reduced, const SegMap& seg, std::optional<double> h) {
  SuperpixelFeatures f;
  f.mean = mean_features(reduced, seg);
  f.adjacency = adjacency(seg);
  f.h = h ? *h : median_neighbor_distance(f.mean, f.adjacency);
  f.weighted = weighted_features(f.mean, f.adjacency, f.h);
  f.position = centroid_positions(seg);
  return f;
}

void write_features_csv(const SuperpixelFeatures& features, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(kModule, "cannot open '" + path.string() + "' for writing");
  const Eigen::Index a = features.mean.cols();
  out << "index,x,y";
  for (Eigen::Index k = 0; k < a; ++k) out << ",mean_" << k + 1;
  for (Eigen::Index k = 0; k < a; ++k) out << ",weighted_" << k + 1;
  out << '\n' << std::setprecision(17);
  for (Eigen::Index i = 0; i < features.mean.rows(); ++i) {
    out << i << ',' << features.position(i, 0) << ',' << features.position(i, 1);
    for (Eigen::Index k = 0; k < a; ++k) out << ',' << features.mean(i, k);
    for (Eigen::Index k = 0; k < a; ++k) out << ',' << features.weighted(i, k);
    out << '\n';
  }
  if (!out) throw Error(kModule, "write failed for '" + path.string() + "'");
}

SuperpixelFeatures read_features_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(kModule, "cannot open '" + path.string() + "' for reading");
  std::string line;
  if (!std::getline(in, line)) throw FormatError(kModule, "features file is empty");
  const auto columns = std::count(line.begin(), line.end(), ',') + 1;
  if (columns < 5 || (columns - 3) % 2 != 0) throw FormatError(kModule, "malformed features header");
  const Eigen::Index a = (columns - 3) / 2;

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw FormatError(kModule, "unparsable value '" + cell + "'");
      }
    }
    if (static_cast<long>(row.size()) != columns) throw FormatError(kModule, "ragged features row");
    if (static_cast<std::size_t>(row[0]) != rows.size()) throw FormatError(kModule, "feature rows out of order");
    rows.push_back(std::move(row));
  }
  SuperpixelFeatures f;
  const auto n = static_cast<Eigen::Index>(rows.size());
  f.mean.resize(n, a);
  f.weighted.resize(n, a);
  f.position.resize(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    f.position(i, 0) = r[1];
    f.position(i, 1) = r[2];
    for (Eigen::Index k = 0; k < a; ++k) {
      f.mean(i, k) = r[static_cast<std::size_t>(3 + k)];
      f.weighted(i, k) = r[static_cast<std::size_t>(3 + a + k)];
    }
  }
  f.adjacency.assign(static_cast<std::size_t>(n), {});
  return f;
}

}  // namespace hsgc
