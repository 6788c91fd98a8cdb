#include "doctest.h"

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "sedge/errors.hpp"
#include "sedge/local.hpp"
#include "sedge/prune.hpp"

using namespace sedge;

namespace {

std::vector<Vertex> by_degree(const SparseGraph& g, std::uint32_t min_deg) {
  std::vector<Vertex> out;
  for (Vertex v = 0; v < g.n_vertices(); ++v) {
    if (g.degree(v) >= min_deg) {
      out.push_back(v);
    }
  }
  return out;
}

// Independent check of the pruned graph with dense BFS.
void check_pruned(const SparseGraph& g, const PrunedGraph& pg) {
  const Eigen::MatrixXd a = oracle::dense_adjacency(pg.pruned);
  std::set<Vertex> rough(pg.rough.begin(), pg.rough.end());
  std::vector<int> seen(pg.pruned.n_vertices(), 0);
  for (Vertex x : pg.rough) {
    const std::vector<int> dist = oracle::dense_bfs(a, x, 6);
    for (Vertex y : pg.rough) {
      if (y != x) {
        CHECK(dist[y] < 0);
      }
    }
    std::uint64_t nodes = 0;
    std::uint64_t edges = 0;
    for (Vertex v = 0; v < pg.pruned.n_vertices(); ++v) {
      if (dist[v] >= 0 && dist[v] <= 3) {
        ++nodes;
        ++seen[v];
        for (Vertex w : pg.pruned.neighbors(v)) {
          edges += w > v && dist[w] >= 0 && dist[w] <= 3;
        }
      }
    }
    CHECK(edges + 1 == nodes);
  }
  for (int s : seen) {
    CHECK(s <= 1);
  }
  std::map<Vertex, std::uint32_t> deg;
  for (const auto& [u, v] : pg.removed_edges) {
    CHECK(g.has_edge(u, v));
    CHECK((rough.count(u) + rough.count(v)) >= 1);
    ++deg[u];
    ++deg[v];
  }
  for (const auto& [v, k] : deg) {
    CHECK(k <= static_cast<std::uint32_t>(pg.c1 + pg.c2 - 2));
  }
  CHECK(pg.pruned.edge_count() + pg.removed_edges.size() == g.edge_count());
}

}  // namespace

TEST_CASE("nothing to prune around a lone star") {
  const std::vector<Edge> e{{0, 1}, {0, 2}, {0, 3}, {3, 4}};
  const SparseGraph g = SparseGraph::from_edges(5, e);
  const std::vector<Vertex> rough{0};
  const PrunedGraph pg = prune(g, rough);
  CHECK(pg.removed_edges.empty());
  CHECK(pg.pruned == g);
  CHECK(pg.hat_stats[0].alpha_hat == 3);
  CHECK(pg.hat_stats[0].beta_hat == 1);
  CHECK(pg.hat_stats[0].spheres == std::vector<std::uint64_t>{1, 3, 1, 0});
}

TEST_CASE("two hubs sharing a neighbor are separated") {
  std::vector<Edge> e;
  for (Vertex i = 1; i <= 5; ++i) {
    e.emplace_back(0, i);
    e.emplace_back(10, 10 + i);
  }
  e.emplace_back(0, 20);
  e.emplace_back(10, 20);
  const SparseGraph g = SparseGraph::from_edges(21, e);
  const std::vector<Vertex> rough{0, 10};
  const PrunedGraph pg = prune(g, rough);
  CHECK(pg.removed_edges == std::vector<Edge>{{0, 20}});
  CHECK(pg.overlap_removals == 1);
  CHECK(pg.cycle_removals == 0);
  CHECK(pg.hat_stats[0].alpha_hat == 5);
  CHECK(pg.hat_stats[1].alpha_hat == 6);
  check_pruned(g, pg);
}

TEST_CASE("a triangle through the root is opened") {
  const std::vector<Edge> e{{0, 1}, {0, 2}, {1, 2}, {0, 3}, {0, 4}};
  const SparseGraph g = SparseGraph::from_edges(5, e);
  const std::vector<Vertex> rough{0};
  const PrunedGraph pg = prune(g, rough);
  CHECK(pg.removed_edges == std::vector<Edge>{{0, 1}});
  CHECK(pg.cycle_removals == 1);
  check_pruned(g, pg);
}

TEST_CASE("a long cycle through the root is opened") {
  // 6-cycle 0..5 lies inside B_3(0).
  std::vector<Edge> e;
  for (Vertex i = 0; i < 6; ++i) {
    e.emplace_back(i, (i + 1) % 6);
  }
  e.emplace_back(0, 6);
  const SparseGraph g = SparseGraph::from_edges(7, e);
  const std::vector<Vertex> rough{0};
  const PrunedGraph pg = prune(g, rough);
  CHECK(pg.removed_edges.size() == 1);
  check_pruned(g, pg);
}

TEST_CASE("random graphs satisfy the pruning postconditions") {
  for (std::uint32_t rep = 0; rep < 20; ++rep) {
    const SparseGraph g = sample_er({400, 1.5, 31, rep});
    const std::vector<Vertex> rough = by_degree(g, 4);
    const PrunedGraph pg = prune(g, rough);
    check_pruned(g, pg);
    CHECK(pg.cycle_removals + pg.overlap_removals == pg.removed_edges.size());

    // Running again on the pruned graph changes nothing.
    const PrunedGraph again = prune(pg.pruned, rough);
    CHECK(again.removed_edges.empty());
  }
}

TEST_CASE("prune argument checks") {
  const SparseGraph g = sample_er({50, 1.0, 1, 0});
  const std::vector<Vertex> bad{50};
  CHECK_THROWS_AS(prune(g, bad), ValidationError);
  CHECK_THROWS_AS(prune(g, {}, 1, 5), ValidationError);
  CHECK_THROWS_AS(prune(g, {}, 2, 4), ValidationError);
}

TEST_CASE("rough test vector on a star is an exact eigenvector") {
  std::vector<Edge> e;
  for (Vertex i = 1; i <= 9; ++i) {
    e.emplace_back(0, i);
  }
  const SparseGraph g = SparseGraph::from_edges(10, e);
  const std::vector<Vertex> rough{0};
  const PrunedGraph pg = prune(g, rough);
  for (int sigma : {1, -1}) {
    const RoughTestVector t = rough_test_vector(pg, 0, sigma);
    CHECK(t.lambda == doctest::Approx(3.0 * sigma));
    CHECK(t.residual < 1e-12);
    CHECK(t.vector.at(0) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(t.vector.at(1) == doctest::Approx(sigma / (3.0 * std::sqrt(2.0))));
  }
}

TEST_CASE("rough test vector on spiders") {
  // Legs of length 2: the vector is the exact top eigenvector (lambda^2 = 5).
  // Legs of length 3: mass leaks from S_2 to S_3, residual sqrt(4 z^2) with
  // z^2 = 1 / (2 a s) = 1/40.
  for (Vertex len : {2u, 3u}) {
    std::vector<Edge> e;
    Vertex next = 1;
    for (int leg = 0; leg < 4; ++leg) {
      Vertex prev = 0;
      for (Vertex j = 0; j < len; ++j) {
        e.emplace_back(prev, next);
        prev = next++;
      }
    }
    const SparseGraph g = SparseGraph::from_edges(next, e);
    const std::vector<Vertex> rough{0};
    const PrunedGraph pg = prune(g, rough);
    const RoughTestVector t = rough_test_vector(pg, 0, 1);
    CHECK(t.lambda == doctest::Approx(std::sqrt(5.0)));
    CHECK(t.vector.at(0) == doctest::Approx(std::sqrt(0.4)));
    CHECK(t.residual == doctest::Approx(len == 2 ? 0.0 : std::sqrt(0.1)).epsilon(1e-12));
  }
}

TEST_CASE("rough test vectors agree with a dense residual and have disjoint supports") {
  for (std::uint32_t rep = 0; rep < 5; ++rep) {
    const SparseGraph g = sample_er({300, 2.0, 41, rep});
    const std::vector<Vertex> rough = by_degree(g, 5);
    const PrunedGraph pg = prune(g, rough);
    const Eigen::MatrixXd a = oracle::dense_adjacency(g);
    std::vector<int> used(g.n_vertices(), 0);
    for (Vertex x : pg.rough) {
      if (pg.pruned.degree(x) == 0) {
        CHECK_THROWS_AS(rough_test_vector(pg, x, 1), ValidationError);
        continue;
      }
      for (int sigma : {1, -1}) {
        const RoughTestVector t = rough_test_vector(pg, x, sigma);
        const std::vector<int> dist = oracle::dense_bfs(a, x, 2);
        double s2 = 0.0;
        for (int dv : dist) {
          s2 += dv == 2;
        }
        const double alpha = g.degree(x);
        CHECK(t.lambda == doctest::Approx(sigma * std::sqrt(alpha + s2 / alpha)));
        Eigen::VectorXd w = Eigen::VectorXd::Zero(g.n_vertices());
        for (std::size_t i = 0; i < t.vector.index.size(); ++i) {
          w[t.vector.index[i]] = t.vector.value[i];
        }
        CHECK(w.norm() == doctest::Approx(1.0));
        CHECK((a * w - t.lambda * w).norm() == doctest::Approx(t.residual).epsilon(1e-10));
        if (sigma == 1) {
          for (Vertex v : t.vector.index) {
            CHECK(++used[v] == 1);
          }
        }
      }
    }
  }
}

TEST_CASE("rough test vector argument checks") {
  const std::vector<Edge> e{{0, 1}, {0, 2}, {0, 3}};
  const SparseGraph g = SparseGraph::from_edges(6, e);
  const std::vector<Vertex> rough{0, 5};
  const PrunedGraph pg = prune(g, rough);
  CHECK_THROWS_AS(rough_test_vector(pg, 0, 0), ValidationError);
  CHECK_THROWS_AS(rough_test_vector(pg, 1, 1), ValidationError);
  CHECK_THROWS_AS(rough_test_vector(pg, 5, 1), ValidationError);
}
