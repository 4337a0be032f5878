#include "hsgc/covfield.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hsgc/dimred.hpp"
#include "hsgc/error.hpp"

namespace hsgc {
namespace {

constexpr const char* kModule = "covfield";

void check_window(int window, double epsilon) {
  if (window < 3 || window % 2 == 0) throw ParameterError(kModule, "covariance window must be odd and >= 3");
  if (!(epsilon > 0.0)) throw ParameterError(kModule, "epsilon must be positive");
}

}  // namespace

void pack_symmetric(const Eigen::MatrixXd& m, std::span<double> out) {
  const int dim = static_cast<int>(m.rows());
  std::size_t k = 0;
  for (int i = 0; i < dim; ++i) {
    out[k++] = m(i, i);
    for (int j = i + 1; j < dim; ++j) out[k++] = std::numbers::sqrt2 * 0.5 * (m(i, j) + m(j, i));
  }
}

Eigen::MatrixXd unpack_symmetric(std::span<const double> packed, int dim) {
  Eigen::MatrixXd m(dim, dim);
  std::size_t k = 0;
  for (int i = 0; i < dim; ++i) {
    m(i, i) = packed[k++];
    for (int j = i + 1; j < dim; ++j) {
      const double v = packed[k++] / std::numbers::sqrt2;
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

double packed_distance_sq(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    sum += d * d;
  }
  return sum;
}

Eigen::MatrixXd local_covariance(const HsiCube& reduced, std::uint32_t x, std::uint32_t y, int window,
                                 double epsilon) {
  check_window(window, epsilon);
  const int dim = static_cast<int>(reduced.bands);
  const int half = window / 2;
  const std::uint32_t x0 = x >= static_cast<std::uint32_t>(half) ? x - half : 0;
  const std::uint32_t y0 = y >= static_cast<std::uint32_t>(half) ? y - half : 0;
  const std::uint32_t x1 = std::min(reduced.width - 1, x + half);
  const std::uint32_t y1 = std::min(reduced.height - 1, y + half);
  const std::size_t n = std::size_t{x1 - x0 + 1} * (y1 - y0 + 1);

  Eigen::MatrixXd samples(dim, static_cast<Eigen::Index>(n));
  Eigen::Index col = 0;
  for (std::uint32_t yy = y0; yy <= y1; ++yy) {
    for (std::uint32_t xx = x0; xx <= x1; ++xx, ++col) {
      const auto px = reduced.pixel(xx, yy);
      for (int a = 0; a < dim; ++a) samples(a, col) = px[a];
    }
  }
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
  if (n > 1) {
    const Eigen::VectorXd mean = samples.rowwise().mean();
    samples.colwise() -= mean;
    cov = samples * samples.transpose() / static_cast<double>(n - 1);
  }
  cov.diagonal().array() += epsilon;
  return cov;
}

Eigen::MatrixXd matrix_log(const Eigen::MatrixXd& spd) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(spd);
  if (solver.info() != Eigen::Success) throw SpdError(kModule, "eigendecomposition failed");
  const Eigen::VectorXd& lambda = solver.eigenvalues();
  if (!(lambda.minCoeff() > 0.0)) {
    throw SpdError(kModule, "matrix is not positive definite (smallest eigenvalue " +
                                std::to_string(lambda.minCoeff()) + ")");
  }
  const Eigen::MatrixXd& v = solver.eigenvectors();
  Eigen::MatrixXd out = v * lambda.array().log().matrix().asDiagonal() * v.transpose();
  return 0.5 * (out + out.transpose());
}

double led_distance(const Eigen::MatrixXd& la, const Eigen::MatrixXd& lb) {
  if (la.rows() != lb.rows() || la.cols() != lb.cols()) {
    throw ParameterError(kModule, "log matrices differ in dimension");
  }
  return (la - lb).norm();
}

double default_epsilon(const HsiCube& reduced, double epsilon_scale) {
  const Eigen::VectorXd mean = mean_spectrum(reduced);
  Eigen::VectorXd var = Eigen::VectorXd::Zero(reduced.bands);
  for (std::size_t p = 0; p < reduced.pixel_count(); ++p) {
    const auto px = reduced.pixel(p);
    for (std::uint32_t b = 0; b < reduced.bands; ++b) {
      const double d = px[b] - mean[b];
      var[b] += d * d;
    }
  }
  const double denom = static_cast<double>(std::max<std::size_t>(1, reduced.pixel_count() - 1));
  const double mean_var = var.sum() / denom / reduced.bands;
  return mean_var > 0.0 ? epsilon_scale * mean_var : epsilon_scale;
}

LogCovField build_log_cov_field(const HsiCube& reduced, int window, double epsilon) {
  reduced.validate();
  check_window(window, epsilon);
  LogCovField field;
  field.width = reduced.width;
  field.height = reduced.height;
  field.dim = static_cast<int>(reduced.bands);
  field.stride = packed_size(field.dim);
  field.logs.assign(field.pixel_count() * field.stride, 0.0);

  const std::ptrdiff_t total = static_cast<std::ptrdiff_t>(field.pixel_count());
  bool failed = false;
  std::string failure;
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t p = 0; p < total; ++p) {
    const auto x = static_cast<std::uint32_t>(p % field.width);
    const auto y = static_cast<std::uint32_t>(p / field.width);
    try {
      pack_symmetric(matrix_log(local_covariance(reduced, x, y, window, epsilon)),
                     field.at(static_cast<std::size_t>(p)));
    } catch (const Error& e) {
#pragma omp critical(hsgc_covfield_failure)
      {
        if (!failed) {
          failed = true;
          failure = "pixel (" + std::to_string(x) + "," + std::to_string(y) + "): " + e.what();
        }
      }
    }
  }
  if (failed) throw SpdError(kModule, failure);
  return field;
}

}  // namespace hsgc
