#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hsgc/graph.hpp"
#include "hsgc/hsi_io.hpp"

namespace hsgc {

/// Row-major so the per-row propagation kernel streams contiguous memory.
using LabelMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct SeedMatrix {
  LabelMatrix y;              // K' x c; column l holds class l + 1
  std::vector<bool> labeled;  // per superpixel
};

/// Row i averages the one-hot labels of the seed pixels inside superpixel i;
/// rows without seed pixels stay zero.
SeedMatrix build_seed_matrix(const SegMap& seg, const LabelMap& seeds, int classes);

/// Symmetric CSR operator D^-1/2 W D^-1/2 with zero diagonal.
struct SparseOperator {
  int n = 0;
  std::vector<int> row_ptr;
  std::vector<int> col;
  std::vector<double> val;
  std::vector<bool> isolated;

  Eigen::MatrixXd dense() const;
};

SparseOperator normalized_affinity(const SimilarityGraph& graph);

struct PropagationParams {
  double alpha = 0.99;
  double tol = 1e-8;
  int max_iters = 5000;
};

struct PropagationResult {
  LabelMatrix f;
  int iterations = 0;
  /// Max-norm change of the last step.
  double residual = 0.0;
  bool converged = false;
  /// Per-step max-norm and Frobenius-norm changes ||F_{t+1} - F_t||.
  std::vector<double> max_residuals;
  std::vector<double> frobenius_residuals;
};

/// One step: out = alpha * S * f + (1 - alpha) * y, rows in parallel.
void propagate_step(const SparseOperator& s, const LabelMatrix& f, const LabelMatrix& y, double alpha,
                    LabelMatrix& out);

/// Iterates F <- alpha S F + (1 - alpha) Y from F = Y until the max-norm
/// change drops below tol or max_iters steps have run.
PropagationResult propagate(const SparseOperator& s, const LabelMatrix& y, const PropagationParams& params = {});

/// Per-row argmax as class ids 1..c, ties to the lowest class; rows with no
/// positive entry get 0.
std::vector<int> argmax_labels(const LabelMatrix& f);

/// Pushes each superpixel's argmax class down to its pixels.
LabelMap finalize_labels(const LabelMatrix& f, const SegMap& seg);

/// Writes F as CSV, one row per superpixel, 17 significant digits.
void write_label_matrix_csv(const LabelMatrix& f, const std::filesystem::path& path);

}  // namespace hsgc
