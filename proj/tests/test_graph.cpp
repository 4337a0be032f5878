#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "hsgc/error.hpp"
#include "hsgc/graph.hpp"
#include "hsgc/parallel.hpp"
#include "hsgc/reference.hpp"

using namespace hsgc;

namespace {

SuperpixelFeatures random_features(std::mt19937_64& gen, int n, int dims) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> pos(0.0, 50.0);
  SuperpixelFeatures f;
  f.mean.resize(n, dims);
  f.weighted.resize(n, dims);
  f.position.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < dims; ++d) {
      f.mean(i, d) = normal(gen);
      f.weighted(i, d) = f.mean(i, d) + 0.3 * normal(gen);
    }
    f.position(i, 0) = pos(gen);
    f.position(i, 1) = pos(gen);
  }
  f.adjacency.assign(static_cast<std::size_t>(n), {});
  return f;
}

SuperpixelFeatures line_features(const std::vector<double>& xs) {
  const int n = static_cast<int>(xs.size());
  SuperpixelFeatures f;
  f.mean = Eigen::MatrixXd::Ones(n, 2);
  f.weighted = Eigen::MatrixXd::Ones(n, 2);
  f.position = Eigen::MatrixXd::Zero(n, 2);
  for (int i = 0; i < n; ++i) f.position(i, 0) = xs[static_cast<std::size_t>(i)];
  f.adjacency.assign(static_cast<std::size_t>(n), {});
  return f;
}

}  // namespace

TEST_CASE("spectral similarity") {
  const Eigen::RowVector2d a(1.0, 2.0);
  const Eigen::RowVector2d b(0.0, 2.0);
  CHECK(spectral_similarity(a, a, a, a, 0.9, 0.3) == 1.0);
  // beta = 1 ignores the weighted term.
  CHECK(spectral_similarity(a, b, a, a, 1.0, 0.3) == 1.0);
  CHECK(spectral_similarity(a, a, a, b, 1.0, 1.0) == doctest::Approx(std::exp(-1.0)));
  // ||dw||^2 = ||dm||^2 = sigma_s^2 with beta = 0.5 gives exp(-1).
  CHECK(spectral_similarity(a, b, a, b, 0.5, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK_THROWS_AS(spectral_similarity(a, b, a, b, 1.5, 1.0), ParameterError);
  CHECK_THROWS_AS(spectral_similarity(a, b, a, b, -0.1, 1.0), ParameterError);
  CHECK_THROWS_AS(spectral_similarity(a, b, a, b, 0.5, 0.0), ParameterError);
}

TEST_CASE("location similarity") {
  const Eigen::RowVector2d p(3.0, 4.0);
  CHECK(location_similarity(p, p, 2.0) == 1.0);
  CHECK(location_similarity(p, Eigen::RowVector2d(0.0, 0.0), 5.0) == doctest::Approx(std::exp(-1.0)));
  double last = 1.0;
  for (int d = 1; d < 20; ++d) {
    const double l = location_similarity(p, p + Eigen::RowVector2d(d, 0), 4.0);
    CHECK(l <= last);
    last = l;
  }
  CHECK_THROWS_AS(location_similarity(p, p, 0.0), ParameterError);
}

TEST_CASE("two nodes give a single edge with w = s * l") {
  std::mt19937_64 gen(1);
  const SuperpixelFeatures f = random_features(gen, 2, 3);
  const SimilarityGraph g = build_graph(f);
  REQUIRE(g.edges.size() == 1);
  const double s = spectral_similarity(f.weighted.row(0), f.weighted.row(1), f.mean.row(0), f.mean.row(1), g.beta,
                                       g.sigma_s);
  const double l = location_similarity(f.position.row(0), f.position.row(1), g.sigma_l);
  CHECK(g.edges[0].w == s * l);
  CHECK_FALSE(g.degenerate);
}

TEST_CASE("identical superpixels give unit weights") {
  SuperpixelFeatures f = line_features({0, 0, 0, 0});
  const SimilarityGraph g = build_graph(f);
  CHECK(g.sigma_s == 1.0);
  CHECK(g.sigma_l == 1.0);
  CHECK(g.edges.size() == 6);
  for (const Edge& e : g.edges) CHECK(e.w == 1.0);
}

TEST_CASE("five collinear centroids with k = 1 give a path") {
  GraphParams params;
  params.k = 1;
  params.sigma_s = 1.0;
  params.sigma_l = 3.0;
  const SimilarityGraph g = build_graph(line_features({0, 1, 3, 6, 10}), params);
  std::set<std::pair<int, int>> edges;
  for (const Edge& e : g.edges) edges.insert({e.i, e.j});
  CHECK(edges == std::set<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 3}, {3, 4}});
}

TEST_CASE("fewer than two nodes is degenerate") {
  const SimilarityGraph g = build_graph(line_features({4}));
  CHECK(g.degenerate);
  CHECK(g.edges.empty());
  CHECK_THROWS_AS(build_graph(line_features({0, 1}), GraphParams{0.9, {}, {}, 0}), ParameterError);
}

TEST_CASE("graph invariants on random features") {
  std::mt19937_64 gen(33);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(gen() % 60);
    const SuperpixelFeatures f = random_features(gen, n, 4);
    GraphParams params;
    params.k = 1 + static_cast<int>(gen() % 25);
    params.beta = (gen() % 11) / 10.0;
    const SimilarityGraph g = build_graph(f, params);
    const int keff = std::min(params.k, n - 1);
    for (const Edge& e : g.edges) {
      CHECK(e.i < e.j);
      CHECK(e.w > 0.0);
      CHECK(e.w <= 1.0);
      const double s = spectral_similarity(f.weighted.row(e.i), f.weighted.row(e.j), f.mean.row(e.i),
                                           f.mean.row(e.j), g.beta, g.sigma_s);
      const double l = location_similarity(f.position.row(e.i), f.position.row(e.j), g.sigma_l);
      CHECK(e.w == std::max(s * l, std::numeric_limits<double>::min()));
    }
    for (int d : g.degrees()) CHECK(d >= keff);
    std::set<std::pair<int, int>> unique;
    for (const Edge& e : g.edges) unique.insert({e.i, e.j});
    CHECK(unique.size() == g.edges.size());
  }
}

TEST_CASE("scaling spectra, positions and widths together leaves weights unchanged") {
  std::mt19937_64 gen(8);
  const SuperpixelFeatures f = random_features(gen, 30, 3);
  SuperpixelFeatures scaled = f;
  const double c = 3.5;
  scaled.mean *= c;
  scaled.weighted *= c;
  scaled.position *= c;
  GraphParams params;
  params.k = 5;
  params.sigma_s = 0.8;
  params.sigma_l = 12.0;
  const SimilarityGraph a = build_graph(f, params);
  params.sigma_s = 0.8 * c;
  params.sigma_l = 12.0 * c;
  const SimilarityGraph b = build_graph(scaled, params);
  REQUIRE(a.edges.size() == b.edges.size());
  for (std::size_t e = 0; e < a.edges.size(); ++e) {
    CHECK(a.edges[e].i == b.edges[e].i);
    CHECK(a.edges[e].j == b.edges[e].j);
    CHECK(b.edges[e].w == doctest::Approx(a.edges[e].w).epsilon(1e-12));
  }
  // The median heuristic scales with the data as well.
  const auto wa = kernel_widths(f, GraphParams{});
  const auto wb = kernel_widths(scaled, GraphParams{});
  CHECK(wb.first == doctest::Approx(c * wa.first));
  CHECK(wb.second == doctest::Approx(c * wa.second));
}

TEST_CASE("parallel nearest neighbors match the serial full sort") {
  std::mt19937_64 gen(19);
  const SuperpixelFeatures f = random_features(gen, 200, 5);
  const auto [ss, sl] = kernel_widths(f, GraphParams{});
  for (int k : {1, 7, 20, 250}) {
    const int saved = thread_count();
    set_thread_count(std::max(2, saved));
    const auto a = nearest_neighbors(f, 0.9, ss, sl, k);
    set_thread_count(saved);
    const auto b = reference::nearest_neighbors(f, 0.9, ss, sl, k);
    CHECK(a == b);
  }
}

TEST_CASE("kNN ties go to the lower index") {
  // Node 0 sits midway between nodes 1 and 2.
  const auto picks = nearest_neighbors(line_features({0, -1, 1}), 0.9, 1.0, 1.0, 1);
  CHECK(picks[0] == std::vector<int>{1});
}

TEST_CASE("graph CSV round-trip and validation") {
  std::mt19937_64 gen(2);
  const SimilarityGraph g = build_graph(random_features(gen, 12, 3), GraphParams{0.9, {}, {}, 3});
  const auto path = std::filesystem::temp_directory_path() / "hsgc_test_graph.csv";
  write_graph_csv(g, path);
  const SimilarityGraph back = read_graph_csv(path, 12);
  REQUIRE(back.edges.size() == g.edges.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    CHECK(back.edges[e].i == g.edges[e].i);
    CHECK(back.edges[e].w == doctest::Approx(g.edges[e].w).epsilon(1e-8));
  }
  {
    std::ofstream bad(path);
    bad << "3,1,0.5\n";
  }
  CHECK_THROWS_AS(read_graph_csv(path, 12), FormatError);
  {
    std::ofstream bad(path);
    bad << "0,1,1.5\n";
  }
  CHECK_THROWS_AS(read_graph_csv(path, 12), FormatError);
  std::filesystem::remove(path);
}
