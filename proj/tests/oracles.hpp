#pragma once

// Reference computations used only by tests. They avoid the library's own
// code paths and, where practical, Eigen's decompositions.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

/// Cyclic Jacobi rotations on a symmetric matrix. Returns eigenvalues sorted
/// non-increasing.
inline std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a, double tol = 1e-14, int sweeps = 100) {
  const int n = static_cast<int>(a.rows());
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off <= tol * tol * std::max(1.0, a.squaredNorm())) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

/// Eigenvalues of a symmetric 3x3 matrix from the roots of its
/// characteristic polynomial (trigonometric form), non-increasing.
inline std::vector<double> charpoly_eigenvalues_3x3(const Eigen::Matrix3d& m) {
  const double c2 = -m.trace();
  const double c1 = m(0, 0) * m(1, 1) + m(0, 0) * m(2, 2) + m(1, 1) * m(2, 2) - m(0, 1) * m(1, 0) -
                    m(0, 2) * m(2, 0) - m(1, 2) * m(2, 1);
  const double c0 = -m.determinant();
  // x^3 + c2 x^2 + c1 x + c0, shifted x = t - c2 / 3.
  const double p = c1 - c2 * c2 / 3.0;
  const double q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
  std::vector<double> roots;
  if (std::abs(p) < 1e-15) {
    const double t = std::cbrt(-q);
    roots = {t, t, t};
  } else {
    const double r = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * r), -1.0, 1.0);
    const double phi = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) roots.push_back(r * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0));
  }
  for (double& x : roots) x -= c2 / 3.0;
  std::sort(roots.begin(), roots.end(), std::greater<>());
  return roots;
}

/// Matrix exponential by scaling and squaring a truncated Taylor series.
inline Eigen::MatrixXd expm_taylor(const Eigen::MatrixXd& a) {
  const double norm = a.lpNorm<Eigen::Infinity>();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Eigen::MatrixXd x = a / std::ldexp(1.0, squarings);
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = term * x / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

/// Random SPD matrix with eigenvalues spread over [lo, hi].
inline Eigen::MatrixXd random_spd(std::mt19937_64& gen, int dim, double lo = 0.05, double hi = 5.0) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uni(lo, hi);
  Eigen::MatrixXd g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = normal(gen);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  const Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd d(dim);
  for (int i = 0; i < dim; ++i) d[i] = uni(gen);
  Eigen::MatrixXd m = q * d.asDiagonal() * q.transpose();
  return 0.5 * (m + m.transpose());
}

/// Kappa computed straight from the definition on a dense count matrix.
template <typename Count>
double kappa_from_counts(const std::vector<std::vector<Count>>& c) {
  const std::size_t k = c.size();
  double n = 0.0;
  double diag = 0.0;
  std::vector<double> rows(k, 0.0);
  std::vector<double> cols(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      n += static_cast<double>(c[i][j]);
      rows[i] += static_cast<double>(c[i][j]);
      cols[j] += static_cast<double>(c[i][j]);
    }
    diag += static_cast<double>(c[i][i]);
  }
  double pe = 0.0;
  for (std::size_t i = 0; i < k; ++i) pe += rows[i] * cols[i];
  pe /= n * n;
  return (diag / n - pe) / (1.0 - pe);
}

}  // namespace oracle
