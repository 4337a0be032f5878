#pragma once

// Serial, straightforward versions of the OpenMP kernels. They are kept for
// the equivalence tests and as the baseline in the benchmark, not used by the
// pipeline.

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "hsgc/covfield.hpp"
#include "hsgc/features.hpp"
#include "hsgc/hsi_io.hpp"
#include "hsgc/lgc.hpp"
#include "hsgc/superpix.hpp"

namespace hsgc::reference {

/// One running sum per covariance entry, pixels in raster order.
Eigen::MatrixXd sample_covariance(const HsiCube& cube, const Eigen::VectorXd& mean);

/// Explicit-loop window covariance followed by matrix_log, pixel by pixel.
LogCovField build_log_cov_field(const HsiCube& reduced, int window, double epsilon);

/// Classic SLIC sweep: centroids in index order scan their search box and
/// claim pixels on strictly smaller cost.
void assign_pixels(const LogCovField& field, std::span<const Centroid> centroids, std::span<const double> ranges,
                   double compactness, double interval, std::span<const std::int32_t> incumbent,
                   std::span<std::int32_t> labels, std::span<double> cost);

/// Full sort of s * l per node.
std::vector<std::vector<int>> nearest_neighbors(const SuperpixelFeatures& features, double beta, double sigma_s,
                                                double sigma_l, int k);

/// Dense-matrix iteration of F <- alpha S F + (1 - alpha) Y.
LabelMatrix propagate(const SparseOperator& s, const LabelMatrix& y, double alpha, int steps);

}  // namespace hsgc::reference
