#include "hsgc/synth.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "hsgc/error.hpp"
#include "hsgc/rng.hpp"

namespace hsgc {
namespace {

constexpr const char* kModule = "synth";
constexpr int kSignatureAttempts = 100;

Eigen::RowVectorXd smooth_signature(Rng& rng, std::uint32_t bands) {
  Eigen::RowVectorXd s(bands);
  double acc = 0.0;
  for (std::uint32_t b = 0; b < bands; ++b) {
    acc += rng.uniform();
    s[b] = acc;
  }
  const double lo = s.minCoeff();
  const double hi = s.maxCoeff();
  if (hi > lo) {
    s = (s.array() - lo) / (hi - lo);
  } else {
    s.setZero();
  }
  return s;
}

double min_separation(const Eigen::MatrixXd& sig) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < sig.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < sig.rows(); ++j) best = std::min(best, (sig.row(i) - sig.row(j)).norm());
  }
  return best;
}

}  // namespace

SynthData generate(const SynthSpec& spec) {
  if (spec.width == 0 || spec.height == 0 || spec.bands == 0) throw ParameterError(kModule, "empty scene");
  if (spec.classes < 2) throw ParameterError(kModule, "need at least 2 classes");
  if (spec.region_seeds < spec.classes) throw ParameterError(kModule, "region_seeds must be >= classes");
  if (!(spec.noise_sigma >= 0.0)) throw ParameterError(kModule, "noise_sigma must be non-negative");
  const std::size_t pixels = std::size_t{spec.width} * spec.height;
  if (static_cast<std::size_t>(spec.region_seeds) > pixels) {
    throw ParameterError(kModule, "more region seeds than pixels");
  }
  if (spec.bands < 2) throw ParameterError(kModule, "need at least 2 bands for distinct signatures");

  Rng rng(spec.rng_seed);

  std::vector<std::size_t> order(pixels);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto sites = static_cast<std::size_t>(spec.region_seeds);
  for (std::size_t k = 0; k < sites; ++k) {
    const std::size_t pick = k + static_cast<std::size_t>(rng.below(pixels - k));
    std::swap(order[k], order[pick]);
  }

  std::vector<int> site_class(sites);
  for (std::size_t k = 0; k < sites; ++k) {
    site_class[k] = k < static_cast<std::size_t>(spec.classes)
                        ? static_cast<int>(k) + 1
                        : static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.classes))) + 1;
  }

  SynthData out;
  out.signatures.resize(spec.classes, spec.bands);
  for (int c = 0; c < spec.classes; ++c) {
    bool separated = false;
    for (int attempt = 0; attempt < kSignatureAttempts && !separated; ++attempt) {
      out.signatures.row(c) = smooth_signature(rng, spec.bands);
      separated = min_separation(out.signatures.topRows(c + 1)) >= kSignatureSeparation;
    }
    if (!separated) throw DataError(kModule, "could not draw separated class signatures");
  }

  out.truth = LabelMap(spec.width, spec.height);
  out.regions = LabelMap(spec.width, spec.height);
  out.cube = HsiCube(spec.width, spec.height, spec.bands);
  for (std::uint32_t y = 0; y < spec.height; ++y) {
    for (std::uint32_t x = 0; x < spec.width; ++x) {
      const std::size_t p = std::size_t{y} * spec.width + x;
      std::size_t nearest = 0;
      long best = -1;
      for (std::size_t k = 0; k < sites; ++k) {
        const long dx = static_cast<long>(x) - static_cast<long>(order[k] % spec.width);
        const long dy = static_cast<long>(y) - static_cast<long>(order[k] / spec.width);
        const long d = dx * dx + dy * dy;
        if (best < 0 || d < best) {
          best = d;
          nearest = k;
        }
      }
      out.regions.labels[p] = static_cast<std::int32_t>(nearest) + 1;
      out.truth.labels[p] = site_class[nearest];
    }
  }

  for (std::size_t p = 0; p < pixels; ++p) {
    const int c = out.truth.labels[p] - 1;
    auto px = out.cube.pixel(p);
    for (std::uint32_t b = 0; b < spec.bands; ++b) {
      const double noise = spec.noise_sigma > 0.0 ? spec.noise_sigma * rng.normal() : 0.0;
      px[b] = static_cast<float>(out.signatures(c, b) + noise);
    }
  }
  return out;
}

}  // namespace hsgc
