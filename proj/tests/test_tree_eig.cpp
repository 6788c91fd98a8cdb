#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "sedge/errors.hpp"
#include "sedge/tree_eig.hpp"

using namespace sedge;

namespace {

SparseGraph star(Vertex leaves) {
  std::vector<Edge> e;
  for (Vertex i = 1; i <= leaves; ++i) {
    e.emplace_back(0, i);
  }
  return SparseGraph::from_edges(leaves + 1, e);
}

// a legs of length 2 around vertex 0.
SparseGraph spider(Vertex a) {
  std::vector<Edge> e;
  for (Vertex i = 0; i < a; ++i) {
    e.emplace_back(0, 1 + 2 * i);
    e.emplace_back(1 + 2 * i, 2 + 2 * i);
  }
  return SparseGraph::from_edges(2 * a + 1, e);
}

// Adjacency of the subgraph induced on the ball, in ball order.
Eigen::MatrixXd ball_matrix(const SparseGraph& g, const RootedBall& b) {
  const auto n = static_cast<Eigen::Index>(b.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (std::uint32_t i = 0; i < b.size(); ++i) {
    for (Vertex w : g.neighbors(b.vertices[i])) {
      if (const auto j = b.index_of(w)) {
        a(i, *j) = 1.0;
      }
    }
  }
  return a;
}

}  // namespace

TEST_CASE("star eigenvalue is sqrt(alpha)") {
  const SparseGraph g = star(16);
  const RootedBall b = extract_ball(g, 0, 2);
  const BallEigenPair p = cf_eigenvalue(b);
  CHECK(p.lambda == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(p.vector[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));
  CHECK(p.residual < 1e-10);
  CHECK(estimate(local_stats(b), 1.0, EstimatorKind::kStar).value == doctest::Approx(4.0));
}

TEST_CASE("spider eigenvalue and estimates") {
  // lambda^2 = a + 1 for a legs of length 2.
  const SparseGraph g = spider(8);
  const RootedBall b = extract_ball(g, 0, 3);
  const LocalStats s = local_stats(b);
  CHECK(cf_eigenvalue(b).lambda == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(estimate(s, 1.0, EstimatorKind::kTwoTerm).value == doctest::Approx(3.0));
  // 8 + 1 + (0 + 8)/64 - 64/512 = 9
  CHECK(estimate(s, 1.0, EstimatorKind::kFourTerm).value == doctest::Approx(3.0));
  // 8 + 1 + 2/8
  CHECK(estimate(s, 1.0, EstimatorKind::kSimplified).value == doctest::Approx(std::sqrt(9.25)));
  // s = 9, inner = 81 - 32 = 49, outer = 8 - 4.5 + 3.5 = 7
  CHECK(estimate(s, 1.0, EstimatorKind::kAdk).value == doctest::Approx(8.0 / std::sqrt(7.0)));
}

TEST_CASE("four-term estimate on hand-built statistics") {
  LocalStats s;
  s.alpha = 10;
  s.beta = 20;
  s.beta2 = 50;
  s.beta11 = 30;
  // 10 + 2 + 80/100 - 400/1000 = 12.4
  CHECK(estimate(s, 2.0, EstimatorKind::kFourTerm).value == doctest::Approx(std::sqrt(12.4)));
  // 10 + 2 + 6/10
  CHECK(estimate(s, 2.0, EstimatorKind::kSimplified).value == doctest::Approx(std::sqrt(12.6)));
  s.beta11.reset();
  CHECK_THROWS_AS(estimate(s, 2.0, EstimatorKind::kFourTerm), ValidationError);
  s.alpha = 0;
  CHECK_THROWS_AS(estimate(s, 2.0, EstimatorKind::kStar), ValidationError);
}

TEST_CASE("adk estimate outside its domain") {
  LocalStats s;
  s.alpha = 2;
  s.beta = 0;
  // (a/d)^2 - 4a/d = 4 - 8 < 0
  const EigenvalueEstimate e = estimate(s, 1.0, EstimatorKind::kAdk);
  CHECK_FALSE(e.in_domain);
  CHECK(std::isnan(e.value));
  CHECK(to_string(EstimatorKind::kAdk) == "adk");
}

TEST_CASE("continued fraction agrees with dense eigensolver on random trees") {
  Philox4x32 rng(3, stream_id(StreamPurpose::kTest, 1));
  for (int t = 0; t < 200; ++t) {
    const std::uint32_t n = 5 + static_cast<std::uint32_t>(rng() % 60);
    const std::uint32_t maxdeg = 2 + static_cast<std::uint32_t>(rng() % 8);
    const auto e = oracle::random_tree(n, maxdeg, rng);
    const SparseGraph g = SparseGraph::from_edges(n, e);
    const Vertex root = static_cast<Vertex>(rng() % n);
    const int r = 1 + static_cast<int>(rng() % 5);
    const RootedBall b = extract_ball(g, root, r);
    if (b.size() < 2) {
      continue;
    }
    const BallEigenPair p = cf_eigenvalue(b);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ball_matrix(g, b));
    const Eigen::Index top = es.eigenvalues().size() - 1;
    REQUIRE(p.lambda == doctest::Approx(es.eigenvalues()[top]).epsilon(1e-10));
    Eigen::VectorXd w = es.eigenvectors().col(top);
    if (w[0] < 0) {
      w = -w;
    }
    double diff = 0.0;
    for (std::uint32_t i = 0; i < b.size(); ++i) {
      diff = std::max(diff, std::abs(p.vector[i] - w[i]));
    }
    CHECK(diff < 1e-8);
    CHECK(p.residual < 1e-9);
    CHECK(p.lambda < forest_bound(static_cast<int>(g.max_degree())) + 1e-12);
  }
}

TEST_CASE("continued fraction rejects cycles") {
  const std::vector<Edge> e{{0, 1}, {1, 2}, {2, 0}};
  const RootedBall b = extract_ball(SparseGraph::from_edges(3, e), 0, 1);
  CHECK_THROWS_AS(cf_eigenvalue(b), ValidationError);
}

TEST_CASE("decay profile of a star") {
  const SparseGraph g = star(16);
  const RootedBall b = extract_ball(g, 0, 1);
  const DecayProfile p = decay_profile(cf_eigenvalue(b), b, 1.0);
  const double h = 1.0 / std::sqrt(2.0);
  CHECK(p.level_mass[0] == doctest::Approx(h));
  CHECK(p.level_mass[1] == doctest::Approx(h));
  CHECK(p.tail_mass[0] == doctest::Approx(h));
  CHECK(p.tail_mass[1] == doctest::Approx(0.0));
  CHECK(p.predicted_level[0] == doctest::Approx(h));
  CHECK(p.predicted_level[1] == doctest::Approx(h));
  // sqrt(1/(1 - 1/16)) (1/16)^{1/2} / sqrt2
  CHECK(p.predicted_tail[1] == doctest::Approx(std::sqrt(16.0 / 15.0) * 0.25 * h));
}

TEST_CASE("decay profile of a spider") {
  const SparseGraph g = spider(8);
  const RootedBall b = extract_ball(g, 0, 2);
  const DecayProfile p = decay_profile(cf_eigenvalue(b), b, 1.0);
  // x : y : z = (lambda - 1/lambda) : 1 : 1/lambda with lambda = 3,
  // eight copies of y and z.
  const double x = 8.0 / 3.0;
  const double norm = std::sqrt(x * x + 8.0 + 8.0 / 9.0);
  CHECK(p.level_mass[0] == doctest::Approx(x / norm));
  CHECK(p.level_mass[1] == doctest::Approx(std::sqrt(8.0) / norm));
  CHECK(p.level_mass[2] == doctest::Approx(std::sqrt(8.0 / 9.0) / norm));
}

TEST_CASE("forest bound") {
  CHECK(forest_bound(5) == doctest::Approx(4.0));
  CHECK_THROWS_AS(forest_bound(1), ValidationError);
  CHECK_THROWS_AS(forest_bound(0), ValidationError);
}

TEST_CASE("truncation residual counts mass leaving the outer sphere") {
  // Star with 4 leaves, leaf 1 continues to vertex 5. Ball radius 1 keeps
  // the star; its eigenvector has leaf entries 1/(2 sqrt2).
  const std::vector<Edge> e{{0, 1}, {0, 2}, {0, 3}, {0, 4}, {1, 5}};
  const SparseGraph g = SparseGraph::from_edges(6, e);
  const RootedBall b = extract_ball(g, 0, 1);
  const BallEigenPair p = cf_eigenvalue(b);
  CHECK(p.lambda == doctest::Approx(2.0));
  CHECK(truncation_residual(g, b, p) == doctest::Approx(1.0 / std::sqrt(8.0)));

  // Checked against the explicit ||A_G w - lambda w|| with w padded by zeros.
  const Eigen::MatrixXd a = oracle::dense_adjacency(g);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(6);
  for (std::uint32_t i = 0; i < b.size(); ++i) {
    w[b.vertices[i]] = p.vector[i];
  }
  CHECK((a * w - p.lambda * w).norm() == doctest::Approx(truncation_residual(g, b, p)).epsilon(1e-9));
}

TEST_CASE("truncation envelope") {
  // 4 (1 + 1) 9^{-2}
  CHECK(truncation_envelope(1.0, 9, 5) == doctest::Approx(8.0 / 81.0));
  CHECK(truncation_envelope(4.0, 16, 3, 1.0) == doctest::Approx(9.0 / 16.0));
}

TEST_CASE("closed-form estimates on the reference statistics") {
  LocalStats s;
  s.alpha = 25;
  s.beta = 75;
  s.beta2 = 300;
  s.beta11 = 225;
  // 25 + 3 + 525/625 - 5625/15625 = 28.48
  CHECK(estimate(s, 1.0, EstimatorKind::kFourTerm).value == doctest::Approx(std::sqrt(28.48)).epsilon(1e-12));
  // 25 + 3 + 12/25
  CHECK(estimate(s, 3.0, EstimatorKind::kSimplified).value == doctest::Approx(std::sqrt(28.48)).epsilon(1e-12));

  LocalStats t;
  t.alpha = 16;
  t.beta = 64;
  // d = 4: b/2a = 2, s = 4 + 1 = 5, inner sqrt(25 - 16) = 3, outer 16 - 10 + 6 = 12
  const EigenvalueEstimate e = estimate(t, 4.0, EstimatorKind::kAdk);
  CHECK(e.in_domain);
  CHECK(e.value == doctest::Approx(16.0 / std::sqrt(12.0)).epsilon(1e-12));
}

TEST_CASE("two-level spider against the dense eigensolver") {
  // Root with 6 children, each with 3 leaves: lambda^2 = 6 + 3.
  std::vector<Edge> e;
  Vertex next = 7;
  for (Vertex c = 1; c <= 6; ++c) {
    e.emplace_back(0, c);
    for (int j = 0; j < 3; ++j) {
      e.emplace_back(c, next++);
    }
  }
  const SparseGraph g = SparseGraph::from_edges(next, e);
  const RootedBall b = extract_ball(g, 0, 2);
  const BallEigenPair p = cf_eigenvalue(b);
  CHECK(p.lambda == doctest::Approx(3.0).epsilon(1e-12));
  const auto es = oracle::dense_eigen(g);
  Eigen::VectorXd w = es.eigenvectors().col(es.eigenvalues().size() - 1);
  if (w[0] < 0) {
    w = -w;
  }
  const DecayProfile prof = decay_profile(p, b, 1.0);
  for (int i = 0; i <= 2; ++i) {
    double sq = 0.0;
    for (Vertex v : b.level(i)) {
      sq += w[v] * w[v];
    }
    CHECK(prof.level_mass[i] == doctest::Approx(std::sqrt(sq)).epsilon(1e-8));
  }
  // Whole component inside the ball: nothing leaks out.
  CHECK(truncation_residual(g, b, p) == 0.0);
}

TEST_CASE("tree eigenpair invariants") {
  Philox4x32 rng(6, stream_id(StreamPurpose::kTest, 3));
  for (int t = 0; t < 100; ++t) {
    const std::uint32_t n = 3 + static_cast<std::uint32_t>(rng() % 80);
    auto e = oracle::random_tree(n, 2 + static_cast<std::uint32_t>(rng() % 6), rng);
    const SparseGraph g = SparseGraph::from_edges(n, e);
    const RootedBall b = extract_ball(g, 0, static_cast<int>(n));
    const BallEigenPair p = cf_eigenvalue(b);
    // Perron vector is positive; lambda^2 >= alpha.
    for (double x : p.vector) {
      CHECK(x > 0.0);
    }
    CHECK(p.lambda * p.lambda >= static_cast<double>(b.level_size(1)) - 1e-12);
    CHECK(p.residual <= 1e-10 * std::max(1.0, p.lambda));

    // Flipping signs on odd levels gives the -lambda eigenvector.
    std::vector<double> flipped = p.vector;
    for (std::uint32_t i = 0; i < b.size(); ++i) {
      if (b.level_of(i) % 2 == 1) {
        flipped[i] = -flipped[i];
      }
    }
    double rq = 0.0;
    for (std::uint32_t i = 0; i < b.size(); ++i) {
      for (Vertex w : g.neighbors(b.vertices[i])) {
        rq += flipped[i] * flipped[*b.index_of(w)];
      }
    }
    CHECK(rq == doctest::Approx(-p.lambda).epsilon(1e-12));

    // Adding a leaf never lowers the top eigenvalue.
    e.emplace_back(static_cast<Vertex>(rng() % n), n);
    const SparseGraph h = SparseGraph::from_edges(n + 1, e);
    CHECK(cf_eigenvalue(extract_ball(h, 0, static_cast<int>(n + 1))).lambda >= p.lambda - 1e-12);
  }
}

TEST_CASE("forest bound on small cases") {
  CHECK(forest_bound(2) == 2.0);
  Philox4x32 rng(7, stream_id(StreamPurpose::kTest, 4));
  for (int t = 0; t < 50; ++t) {
    std::vector<Edge> e;
    Vertex base = 0;
    for (int k = 0; k < 3; ++k) {
      for (const auto& [a, b] : oracle::random_tree(30, 5, rng)) {
        e.emplace_back(a + base, b + base);
      }
      base += 30;
    }
    const SparseGraph g = SparseGraph::from_edges(base, e);
    const auto es = oracle::dense_eigen(g);
    CHECK(es.eigenvalues()[base - 1] <= 4.0);
  }
}
