#include <doctest.h>

#include <cmath>
#include <random>

#include "hsgc/error.hpp"
#include "hsgc/lgc.hpp"
#include "hsgc/parallel.hpp"
#include "hsgc/reference.hpp"

using namespace hsgc;

namespace {

SimilarityGraph make_graph(int n, std::vector<Edge> edges) {
  SimilarityGraph g;
  g.node_count = n;
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
  g.edges = std::move(edges);
  return g;
}

SimilarityGraph random_graph(std::mt19937_64& gen, int n, double density) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (uni(gen) < density) edges.push_back({i, j, 0.01 + 0.99 * uni(gen)});
  return make_graph(n, edges);
}

LabelMatrix random_seeds(std::mt19937_64& gen, int n, int c) {
  LabelMatrix y = LabelMatrix::Zero(n, c);
  const int labeled = 1 + static_cast<int>(gen() % static_cast<std::uint64_t>(n));
  for (int k = 0; k < labeled; ++k) y(static_cast<Eigen::Index>(gen() % n), static_cast<Eigen::Index>(gen() % c)) = 1.0;
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    const double s = y.row(i).sum();
    if (s > 0) y.row(i) /= s;
  }
  return y;
}

Eigen::MatrixXd closed_form(const SparseOperator& s, const LabelMatrix& y, double alpha) {
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(s.n, s.n) - alpha * s.dense();
  return (1.0 - alpha) * a.fullPivLu().solve(Eigen::MatrixXd(y));
}

SegMap strip_seg(std::vector<std::int32_t> a, int count) {
  SegMap s;
  s.width = static_cast<std::uint32_t>(a.size());
  s.height = 1;
  s.assignment = std::move(a);
  s.count = count;
  return s;
}

}  // namespace

TEST_CASE("seed matrix averages over labeled member pixels") {
  const SegMap seg = strip_seg({0, 0, 0, 0, 1, 1, 2, 2}, 3);
  LabelMap seeds(8, 1);
  seeds.labels = {1, 1, 2, 0, 0, 0, 3, 3};
  const SeedMatrix m = build_seed_matrix(seg, seeds, 3);
  CHECK(m.y(0, 0) == doctest::Approx(2.0 / 3.0));
  CHECK(m.y(0, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(m.y(0, 2) == 0.0);
  CHECK(m.y.row(1).isZero());
  CHECK(m.y(2, 2) == 1.0);
  CHECK(m.y.row(2).sum() == 1.0);
  CHECK(m.labeled == std::vector<bool>{true, false, true});
  CHECK_THROWS_AS(build_seed_matrix(seg, seeds, 0), ParameterError);
  CHECK_THROWS_AS(build_seed_matrix(seg, seeds, 2), ParameterError);
}

TEST_CASE("normalized affinity closed forms") {
  SUBCASE("two nodes") {
    const SparseOperator s = normalized_affinity(make_graph(2, {{0, 1, 0.37}}));
    const Eigen::MatrixXd d = s.dense();
    CHECK(d(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(d(1, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(d(0, 0) == 0.0);
  }
  SUBCASE("3-node path") {
    const Eigen::MatrixXd d = normalized_affinity(make_graph(3, {{0, 1, 1.0}, {1, 2, 1.0}})).dense();
    CHECK(d(0, 1) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(d(1, 2) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(d(0, 2) == 0.0);
  }
  SUBCASE("star spectral radius") {
    std::vector<Edge> edges;
    for (int j = 1; j < 9; ++j) edges.push_back({0, j, 0.5});
    const Eigen::MatrixXd d = normalized_affinity(make_graph(9, edges)).dense();
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(d).eigenvalues();
    CHECK(ev.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
  }
  SUBCASE("isolated node") {
    const SparseOperator s = normalized_affinity(make_graph(3, {{0, 1, 1.0}}));
    CHECK(s.isolated == std::vector<bool>{false, false, true});
    CHECK(s.dense().row(2).isZero());
    LabelMatrix y = LabelMatrix::Zero(3, 2);
    y(2, 1) = 1.0;
    const PropagationResult r = propagate(s, y, {0.9, 1e-12, 100});
    CHECK(r.f(2, 1) == doctest::Approx(0.1));
  }
}

TEST_CASE("propagation basics") {
  const SparseOperator s = normalized_affinity(make_graph(4, {{0, 1, 1.0}, {1, 2, 0.5}, {2, 3, 0.25}}));
  SUBCASE("zero seeds stay zero") {
    const PropagationResult r = propagate(s, LabelMatrix::Zero(4, 3));
    CHECK(r.f.isZero());
    CHECK(r.converged);
  }
  SUBCASE("a single labeled node wins everywhere") {
    LabelMatrix y = LabelMatrix::Zero(4, 3);
    y(3, 1) = 1.0;
    const PropagationResult r = propagate(s, y);
    CHECK(r.converged);
    CHECK(argmax_labels(r.f) == std::vector<int>{2, 2, 2, 2});
    CHECK(r.f.col(0).isZero());
    CHECK(r.f.col(2).isZero());
  }
  SUBCASE("non-convergence is flagged") {
    LabelMatrix y = LabelMatrix::Zero(4, 3);
    y(0, 0) = 1.0;
    const PropagationResult r = propagate(s, y, {0.99, 1e-14, 3});
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 3);
  }
  SUBCASE("bad parameters") {
    const LabelMatrix y = LabelMatrix::Zero(4, 1);
    CHECK_THROWS_AS(propagate(s, y, {1.0, 1e-8, 10}), ParameterError);
    CHECK_THROWS_AS(propagate(s, y, {0.0, 1e-8, 10}), ParameterError);
    CHECK_THROWS_AS(propagate(s, LabelMatrix::Zero(3, 1)), ParameterError);
  }
}

TEST_CASE("iteration matches the dense closed form and contracts in the Frobenius norm") {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 5 + static_cast<int>(gen() % 46);
    const SimilarityGraph g = random_graph(gen, n, 0.2);
    const SparseOperator s = normalized_affinity(g);
    const LabelMatrix y = random_seeds(gen, n, 1 + static_cast<int>(gen() % 5));
    const double alpha = 0.99;
    const PropagationResult r = propagate(s, y, {alpha, 1e-12, 20000});
    REQUIRE(r.converged);
    CHECK((Eigen::MatrixXd(r.f) - closed_form(s, y, alpha)).cwiseAbs().maxCoeff() < 1e-6);
    const auto& res = r.frobenius_residuals;
    for (std::size_t t = 0; t < res.size(); ++t) {
      CHECK(res[t] <= std::pow(alpha, static_cast<double>(t)) * res[0] * (1.0 + 1e-9) + 1e-300);
    }
  }
}

TEST_CASE("the max-norm residual can shrink slower than alpha") {
  // On a star the hub row of S sums to more than 1, so a residual spread
  // over the leaves can grow in the max norm for one step.
  std::vector<Edge> edges;
  for (int j = 1; j < 10; ++j) edges.push_back({0, j, 1.0});
  const SparseOperator s = normalized_affinity(make_graph(10, edges));
  LabelMatrix y = LabelMatrix::Zero(10, 2);
  y(0, 0) = 1.0;
  for (int j = 1; j < 10; ++j) y(j, 1) = 1.0;
  const double alpha = 0.5;
  const PropagationResult r = propagate(s, y, {alpha, 1e-14, 200});
  bool exceeded = false;
  for (std::size_t t = 1; t < r.max_residuals.size(); ++t) {
    if (r.max_residuals[t] > alpha * r.max_residuals[t - 1] * (1.0 + 1e-9)) exceeded = true;
  }
  CHECK(exceeded);
}

TEST_CASE("sparse iteration matches the dense serial reference step for step") {
  std::mt19937_64 gen(3);
  const SimilarityGraph g = random_graph(gen, 40, 0.3);
  const SparseOperator s = normalized_affinity(g);
  const LabelMatrix y = random_seeds(gen, 40, 4);
  const int saved = thread_count();
  set_thread_count(std::max(2, saved));
  const PropagationResult r = propagate(s, y, {0.9, 1e-300, 25});
  set_thread_count(saved);
  const LabelMatrix dense = reference::propagate(s, y, 0.9, 25);
  CHECK((r.f - dense).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("scaling Y scales F and keeps every decision") {
  std::mt19937_64 gen(5);
  const SparseOperator s = normalized_affinity(random_graph(gen, 30, 0.25));
  const LabelMatrix y = random_seeds(gen, 30, 3);
  const PropagationResult a = propagate(s, y, {0.99, 1e-12, 20000});
  const PropagationResult b = propagate(s, 7.5 * y, {0.99, 1e-11, 20000});
  CHECK((7.5 * a.f - b.f).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(argmax_labels(a.f) == argmax_labels(b.f));
}

TEST_CASE("argmax and push-down conventions") {
  LabelMatrix f(3, 3);
  f << 0.2, 0.7, 0.1, 0.5, 0.5, 0.0, 0.0, 0.0, 0.0;
  CHECK(argmax_labels(f) == std::vector<int>{2, 1, 0});
  const SegMap seg = strip_seg({0, 0, 1, 2, 2}, 3);
  const LabelMap out = finalize_labels(f, seg);
  CHECK(out.labels == std::vector<std::int32_t>{2, 2, 1, 0, 0});
  CHECK_THROWS_AS(finalize_labels(f, strip_seg({0, 1}, 2)), ParameterError);
}
