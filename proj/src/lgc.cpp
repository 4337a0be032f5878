#include "hsgc/lgc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "hsgc/error.hpp"

namespace hsgc {
namespace {

constexpr const char* kModule = "lgc";

}  // namespace

SeedMatrix build_seed_matrix(const SegMap& seg, const LabelMap& seeds, int classes) {
  if (classes <= 0) throw ParameterError(kModule, "class count must be positive");
  if (seeds.width != seg.width || seeds.height != seg.height) {
    throw ParameterError(kModule, "seed map and segmentation differ in size");
  }
  SeedMatrix out;
  out.y = LabelMatrix::Zero(seg.count, classes);
  std::vector<int> seeded(static_cast<std::size_t>(seg.count), 0);
  for (std::size_t p = 0; p < seg.pixel_count(); ++p) {
    const int c = seeds.labels[p];
    if (c == 0) continue;
    if (c > classes) {
      throw ParameterError(kModule, "seed class " + std::to_string(c) + " exceeds class count " +
                                        std::to_string(classes));
    }
    const int i = seg.assignment[p];
    out.y(i, c - 1) += 1.0;
    ++seeded[static_cast<std::size_t>(i)];
  }
  out.labeled.resize(static_cast<std::size_t>(seg.count));
  for (int i = 0; i < seg.count; ++i) {
    const int n = seeded[static_cast<std::size_t>(i)];
    out.labeled[static_cast<std::size_t>(i)] = n > 0;
    if (n > 0) out.y.row(i) /= n;
  }
  return out;
}

Eigen::MatrixXd SparseOperator::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int e = row_ptr[static_cast<std::size_t>(i)]; e < row_ptr[static_cast<std::size_t>(i) + 1]; ++e) {
      m(i, col[static_cast<std::size_t>(e)]) = val[static_cast<std::size_t>(e)];
    }
  }
  return m;
}

SparseOperator normalized_affinity(const SimilarityGraph& graph) {
  const int n = graph.node_count;
  std::vector<double> degree(static_cast<std::size_t>(n), 0.0);
  std::vector<int> count(static_cast<std::size_t>(n), 0);
  for (const Edge& e : graph.edges) {
    degree[static_cast<std::size_t>(e.i)] += e.w;
    degree[static_cast<std::size_t>(e.j)] += e.w;
    ++count[static_cast<std::size_t>(e.i)];
    ++count[static_cast<std::size_t>(e.j)];
  }

  SparseOperator s;
  s.n = n;
  s.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 0; i < n; ++i) s.row_ptr[static_cast<std::size_t>(i) + 1] = s.row_ptr[static_cast<std::size_t>(i)] + count[static_cast<std::size_t>(i)];
  s.col.resize(static_cast<std::size_t>(s.row_ptr.back()));
  s.val.resize(s.col.size());
  s.isolated.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) s.isolated[static_cast<std::size_t>(i)] = count[static_cast<std::size_t>(i)] == 0;

  // Edges are sorted by (i, j), so filling both directions in edge order
  // leaves every row's columns ascending.
  std::vector<std::vector<std::pair<int, double>>> rows(static_cast<std::size_t>(n));
  for (const Edge& e : graph.edges) {
    const double v = e.w / std::sqrt(degree[static_cast<std::size_t>(e.i)] * degree[static_cast<std::size_t>(e.j)]);
    rows[static_cast<std::size_t>(e.i)].emplace_back(e.j, v);
    rows[static_cast<std::size_t>(e.j)].emplace_back(e.i, v);
  }
  for (int i = 0; i < n; ++i) {
    auto& r = rows[static_cast<std::size_t>(i)];
    std::sort(r.begin(), r.end());
    std::size_t at = static_cast<std::size_t>(s.row_ptr[static_cast<std::size_t>(i)]);
    for (const auto& [j, v] : r) {
      s.col[at] = j;
      s.val[at] = v;
      ++at;
    }
  }
  return s;
}

void propagate_step(const SparseOperator& s, const LabelMatrix& f, const LabelMatrix& y, double alpha,
                    LabelMatrix& out) {
  const Eigen::Index c = f.cols();
#pragma omp parallel for schedule(dynamic, 64)
  for (int i = 0; i < s.n; ++i) {
    double* dst = out.data() + static_cast<Eigen::Index>(i) * c;
    const double* seed = y.data() + static_cast<Eigen::Index>(i) * c;
    for (Eigen::Index l = 0; l < c; ++l) dst[l] = 0.0;
    for (int e = s.row_ptr[static_cast<std::size_t>(i)]; e < s.row_ptr[static_cast<std::size_t>(i) + 1]; ++e) {
      const double v = s.val[static_cast<std::size_t>(e)];
      const double* src = f.data() + static_cast<Eigen::Index>(s.col[static_cast<std::size_t>(e)]) * c;
      for (Eigen::Index l = 0; l < c; ++l) dst[l] += v * src[l];
    }
    for (Eigen::Index l = 0; l < c; ++l) dst[l] = alpha * dst[l] + (1.0 - alpha) * seed[l];
  }
}

PropagationResult propagate(const SparseOperator& s, const LabelMatrix& y, const PropagationParams& params) {
  if (!(params.alpha > 0.0 && params.alpha < 1.0)) throw ParameterError(kModule, "alpha must lie in (0, 1)");
  if (!(params.tol > 0.0)) throw ParameterError(kModule, "tolerance must be positive");
  if (params.max_iters < 1) throw ParameterError(kModule, "max_iters must be >= 1");
  if (y.rows() != s.n) throw ParameterError(kModule, "seed matrix rows do not match the graph");

  PropagationResult r;
  r.f = y;
  LabelMatrix next(y.rows(), y.cols());
  for (int it = 0; it < params.max_iters; ++it) {
    propagate_step(s, r.f, y, params.alpha, next);
    const LabelMatrix diff = next - r.f;
    const double max_change = diff.size() ? diff.cwiseAbs().maxCoeff() : 0.0;
    r.max_residuals.push_back(max_change);
    r.frobenius_residuals.push_back(diff.norm());
    r.f.swap(next);
    r.iterations = it + 1;
    r.residual = max_change;
    if (max_change < params.tol) {
      r.converged = true;
      break;
    }
  }
  return r;
}

std::vector<int> argmax_labels(const LabelMatrix& f) {
  std::vector<int> out(static_cast<std::size_t>(f.rows()), 0);
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    double best = 0.0;
    for (Eigen::Index l = 0; l < f.cols(); ++l) {
      if (f(i, l) > best) {
        best = f(i, l);
        out[static_cast<std::size_t>(i)] = static_cast<int>(l) + 1;
      }
    }
  }
  return out;
}

LabelMap finalize_labels(const LabelMatrix& f, const SegMap& seg) {
  if (f.rows() != seg.count) throw ParameterError(kModule, "F rows do not match the superpixel count");
  const std::vector<int> labels = argmax_labels(f);
  LabelMap out(seg.width, seg.height);
  for (std::size_t p = 0; p < seg.pixel_count(); ++p) {
    out.labels[p] = labels[static_cast<std::size_t>(seg.assignment[p])];
  }
  return out;
}

void write_label_matrix_csv(const LabelMatrix& f, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(kModule, "cannot open '" + path.string() + "' for writing");
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    for (Eigen::Index l = 0; l < f.cols(); ++l) out << (l ? "," : "") << f(i, l);
    out << '\n';
  }
  if (!out) throw Error(kModule, "write failed for '" + path.string() + "'");
}

}  // namespace hsgc
