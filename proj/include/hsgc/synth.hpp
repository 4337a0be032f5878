#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "hsgc/hsi_io.hpp"

namespace hsgc {

struct SynthSpec {
  std::uint32_t width = 64;
  std::uint32_t height = 64;
  std::uint32_t bands = 16;
  int classes = 4;
  int region_seeds = 24;
  double noise_sigma = 0.05;
  std::uint64_t rng_seed = 7;
};

/// Minimum Euclidean distance between any two class signatures.
inline constexpr double kSignatureSeparation = 0.25;

struct SynthData {
  HsiCube cube;
  LabelMap truth;
  Eigen::MatrixXd signatures;  // classes x bands
  LabelMap regions;            // Voronoi cell index + 1 per pixel
};

/// Voronoi scene with one smooth spectral signature per class plus Gaussian
/// noise. Random draws, all from one Rng stream in this order: site pixels
/// (partial Fisher-Yates over raster indices), classes of sites beyond the
/// first `classes` (which take 1..c), signatures (each redrawn until separated from
/// the earlier ones),
/// then per-sample noise in raster then band order.
SynthData generate(const SynthSpec& spec);

}  // namespace hsgc
