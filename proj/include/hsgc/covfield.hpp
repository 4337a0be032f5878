#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "hsgc/hsi_io.hpp"

namespace hsgc {

/// Number of stored coefficients for a dim x dim symmetric matrix.
constexpr int packed_size(int dim) { return dim * (dim + 1) / 2; }

/// Packs the upper triangle of a symmetric matrix with off-diagonal entries
/// scaled by sqrt(2), so the Euclidean norm of the packed vector equals the
/// Frobenius norm of the matrix. Means of packed vectors are packed means.
void pack_symmetric(const Eigen::MatrixXd& m, std::span<double> out);
Eigen::MatrixXd unpack_symmetric(std::span<const double> packed, int dim);

/// Squared Euclidean distance between two packed vectors, i.e. the squared
/// Log-Euclidean distance when both hold matrix logarithms.
double packed_distance_sq(std::span<const double> a, std::span<const double> b);

/// Matrix logarithm of each pixel's regularized local spectral covariance,
/// stored packed (see pack_symmetric).
struct LogCovField {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  int dim = 0;
  int stride = 0;  // packed_size(dim)
  std::vector<double> logs;

  std::size_t pixel_count() const { return std::size_t{width} * height; }
  std::span<const double> at(std::size_t pixel) const { return {logs.data() + pixel * stride, static_cast<std::size_t>(stride)}; }
  std::span<double> at(std::size_t pixel) { return {logs.data() + pixel * stride, static_cast<std::size_t>(stride)}; }
  std::span<const double> at(std::uint32_t x, std::uint32_t y) const { return at(std::size_t{y} * width + x); }
  Eigen::MatrixXd matrix(std::size_t pixel) const { return unpack_symmetric(at(pixel), dim); }
};

/// Covariance (denominator n - 1) of the spectra in the window x window
/// neighborhood of (x, y), clamped to the image, plus epsilon * I. A window
/// holding a single pixel contributes a zero sample covariance.
Eigen::MatrixXd local_covariance(const HsiCube& reduced, std::uint32_t x, std::uint32_t y, int window,
                                 double epsilon);

/// V diag(ln lambda) V^T; throws SpdError if any eigenvalue is <= 0.
Eigen::MatrixXd matrix_log(const Eigen::MatrixXd& spd);

/// Frobenius norm of la - lb.
double led_distance(const Eigen::MatrixXd& la, const Eigen::MatrixXd& lb);

/// epsilon_scale times the mean per-band variance of the cube; falls back to
/// epsilon_scale itself when the cube has no variance at all.
double default_epsilon(const HsiCube& reduced, double epsilon_scale);

LogCovField build_log_cov_field(const HsiCube& reduced, int window, double epsilon);

}  // namespace hsgc
