#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sedge/errors.hpp"
#include "sedge/graph.hpp"
#include "sedge/sparse_eigen.hpp"

namespace sedge {

struct HatStats {
  Vertex x = 0;
  std::uint32_t alpha_hat = 0;
  std::uint64_t beta_hat = 0;
  std::vector<std::uint64_t> spheres;  // |S^_0| .. |S^_3|
};

/// G with edges removed so that radius-3 balls around the rough vertices are
/// disjoint trees.
struct PrunedGraph {
  const SparseGraph* base = nullptr;
  SparseGraph pruned;
  std::vector<Edge> removed_edges;  // (u, v), u < v, sorted
  std::vector<Vertex> rough;        // ascending
  std::vector<HatStats> hat_stats;  // aligned with `rough`
  std::uint32_t removed_max_degree = 0;
  int c1 = 2;
  int c2 = 5;
  std::size_t cycle_removals = 0;
  std::size_t overlap_removals = 0;
};

/// Raised when the pruned graph misses a postcondition. `root` is the rough
/// vertex whose ball is at fault.
class PrunePostconditionError : public PostconditionError {
 public:
  PrunePostconditionError(const std::string& what, Vertex root) : PostconditionError(what), root_(root) {}
  Vertex root() const { return root_; }

 private:
  Vertex root_;
};

/// Visits rough vertices x in ascending id order on the current graph:
///  1. while B_3(x) contains a cycle, delete the edge from x to the level-1
///     ancestor of the cycle's deepest endpoint;
///  2. while another rough vertex lies within distance 6 of x (so the two
///     radius-3 balls meet), delete the first edge of a shortest path to it.
/// Afterwards checks that the balls are disjoint trees and that the removed
/// edges form a graph of max degree <= c1 + c2 - 2; throws
/// PrunePostconditionError otherwise.
PrunedGraph prune(const SparseGraph& g, std::span<const Vertex> rough, int c1 = 2, int c2 = 5);

struct RoughTestVector {
  SparseVector vector;
  double lambda = 0.0;    // sigma * sqrt(alpha + beta/alpha) on the unpruned graph
  double residual = 0.0;  // ||A_G w - lambda w||
};

/// Test vector built from the pruned 2-ball of x:
///   (1/sqrt2) [ sqrt(a)/sqrt(a + b/a) 1_x + sigma/sqrt(a) 1_{S1} + 1/sqrt(a (a + b/a)) 1_{S2} ]
/// with a, b the pruned degree and 2-sphere size. Throws ValidationError if
/// x is not rough, sigma is not +-1, or x is isolated after pruning.
RoughTestVector rough_test_vector(const PrunedGraph& pg, Vertex x, int sigma);

}  // namespace sedge
