#include "hsgc/dimred.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hsgc/error.hpp"

namespace hsgc {
namespace {

constexpr const char* kModule = "dimred";
constexpr std::size_t kChunk = 4096;

}  // namespace

Eigen::VectorXd mean_spectrum(const HsiCube& cube) {
  const int bands = static_cast<int>(cube.bands);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(bands);
  for (std::size_t p = 0; p < cube.pixel_count(); ++p) {
    const auto px = cube.pixel(p);
    for (int b = 0; b < bands; ++b) sum[b] += px[b];
  }
  return sum / static_cast<double>(cube.pixel_count());
}

Eigen::MatrixXd sample_covariance(const HsiCube& cube, const Eigen::VectorXd& mean) {
  const int bands = static_cast<int>(cube.bands);
  const std::size_t n = cube.pixel_count();
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<Eigen::MatrixXd> partial(chunks);

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kChunk;
    const std::size_t end = std::min(n, begin + kChunk);
    Eigen::MatrixXd centered(bands, static_cast<Eigen::Index>(end - begin));
    for (std::size_t p = begin; p < end; ++p) {
      const auto px = cube.pixel(p);
      for (int b = 0; b < bands; ++b) centered(b, static_cast<Eigen::Index>(p - begin)) = px[b] - mean[b];
    }
    partial[static_cast<std::size_t>(c)] = centered * centered.transpose();
  }

  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(bands, bands);
  for (const auto& s : partial) scatter += s;
  return scatter / static_cast<double>(n - 1);
}

int component_count_for(std::span<const double> eigenvalues, double target) {
  const double total = std::accumulate(eigenvalues.begin(), eigenvalues.end(), 0.0);
  if (!(total > 0.0)) return 1;
  // Relative slack absorbs the rounding of an exact boundary like 3/(3+1).
  const double goal = target * total * (1.0 - 1e-12);
  double kept = 0.0;
  for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
    kept += eigenvalues[k];
    if (kept >= goal) return static_cast<int>(k + 1);
  }
  return static_cast<int>(eigenvalues.size());
}

PcaModel fit_pca(const HsiCube& cube, double variance_target, int max_bands) {
  cube.validate();
  if (cube.pixel_count() < 2) throw ParameterError(kModule, "PCA needs at least 2 pixels");
  if (!(variance_target > 0.0 && variance_target <= 1.0)) {
    throw ParameterError(kModule, "variance target must lie in (0, 1]");
  }

  PcaModel model;
  model.mean = mean_spectrum(cube);
  const Eigen::MatrixXd cov = sample_covariance(cube, model.mean);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw DataError(kModule, "covariance eigendecomposition failed");

  const int bands = static_cast<int>(cube.bands);
  // Eigen sorts ascending; flip to non-increasing.
  model.spectrum.resize(static_cast<std::size_t>(bands));
  for (int k = 0; k < bands; ++k) model.spectrum[static_cast<std::size_t>(k)] = std::max(0.0, solver.eigenvalues()[bands - 1 - k]);

  int kept = component_count_for(model.spectrum, variance_target);
  if (max_bands > 0) kept = std::min(kept, max_bands);

  model.components.resize(kept, bands);
  for (int k = 0; k < kept; ++k) {
    Eigen::VectorXd v = solver.eigenvectors().col(bands - 1 - k);
    Eigen::Index largest = 0;
    v.cwiseAbs().maxCoeff(&largest);
    if (v[largest] < 0.0) v = -v;
    model.components.row(k) = v.transpose();
  }
  model.eigenvalues.assign(model.spectrum.begin(), model.spectrum.begin() + kept);

  const double total = std::accumulate(model.spectrum.begin(), model.spectrum.end(), 0.0);
  const double retained = std::accumulate(model.eigenvalues.begin(), model.eigenvalues.end(), 0.0);
  model.explained_ratio = total > 0.0 ? retained / total : 1.0;
  return model;
}

HsiCube project(const HsiCube& cube, const PcaModel& model) {
  cube.validate();
  if (static_cast<int>(cube.bands) != model.bands()) {
    throw ParameterError(kModule, "cube has " + std::to_string(cube.bands) + " bands, model expects " +
                                      std::to_string(model.bands()));
  }
  const int bands = model.bands();
  const int reduced = model.reduced_bands();
  HsiCube out(cube.width, cube.height, static_cast<std::uint32_t>(reduced));

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(cube.pixel_count()); ++p) {
    const auto px = cube.pixel(static_cast<std::size_t>(p));
    Eigen::VectorXd centered(bands);
    for (int b = 0; b < bands; ++b) centered[b] = px[b] - model.mean[b];
    const Eigen::VectorXd y = model.components * centered;
    auto dst = out.pixel(static_cast<std::size_t>(p));
    for (int a = 0; a < reduced; ++a) dst[a] = static_cast<float>(y[a]);
  }
  return out;
}

}  // namespace hsgc
