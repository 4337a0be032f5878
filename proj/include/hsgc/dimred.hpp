#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "hsgc/hsi_io.hpp"

namespace hsgc {

/// PCA basis fitted on every pixel spectrum of a cube.
struct PcaModel {
  Eigen::VectorXd mean;          // B
  Eigen::MatrixXd components;    // A x B, orthonormal rows
  std::vector<double> eigenvalues;  // kept, non-increasing
  std::vector<double> spectrum;     // all B eigenvalues, non-increasing
  double explained_ratio = 1.0;

  int bands() const { return static_cast<int>(mean.size()); }
  int reduced_bands() const { return static_cast<int>(components.rows()); }
};

/// Sample covariance (denominator n - 1) of the cube's pixel spectra around
/// `mean`. Pixels are summed in fixed 4096-pixel chunks whose partial sums
/// are combined in chunk order, so the result does not depend on the thread
/// count.
Eigen::MatrixXd sample_covariance(const HsiCube& cube, const Eigen::VectorXd& mean);

Eigen::VectorXd mean_spectrum(const HsiCube& cube);

/// Smallest count whose leading eigenvalues reach `target` of the total.
/// Eigenvalues must be sorted non-increasing; a zero total gives 1.
int component_count_for(std::span<const double> eigenvalues, double target);

/// `max_bands` <= 0 means uncapped.
PcaModel fit_pca(const HsiCube& cube, double variance_target, int max_bands = 0);

HsiCube project(const HsiCube& cube, const PcaModel& model);

}  // namespace hsgc
