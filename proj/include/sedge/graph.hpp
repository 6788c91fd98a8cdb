#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace sedge {

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

/// Parameters of G(N, d/N). `replicate` selects the RNG stream so that
/// ensemble members drawn from the same seed are independent.
struct GraphConfig {
  std::uint64_t n_vertices = 0;
  double expected_degree = 0.0;
  std::uint64_t seed = 0;
  std::uint32_t replicate = 0;

  double edge_probability() const { return expected_degree / static_cast<double>(n_vertices); }

  /// Throws ValidationError unless N >= 2 and 0 <= d < N.
  void validate() const;
};

/// Immutable undirected simple graph in compressed-row form. Neighbor lists
/// are sorted, symmetric, loop-free and duplicate-free.
class SparseGraph {
 public:
  SparseGraph() = default;

  /// Builds from an unordered edge list. Rejects self-loops, duplicate edges
  /// and out-of-range endpoints with ValidationError.
  static SparseGraph from_edges(std::uint64_t n_vertices, std::span<const Edge> edges);

  /// Adopts an already-built CSR layout after checking every invariant.
  static SparseGraph from_csr(std::vector<std::uint64_t> offsets, std::vector<Vertex> targets);

  Vertex n_vertices() const { return offsets_.empty() ? 0 : static_cast<Vertex>(offsets_.size() - 1); }
  std::uint64_t edge_count() const { return targets_.size() / 2; }

  std::span<const Vertex> neighbors(Vertex v) const {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }
  std::uint32_t degree(Vertex v) const {
    return static_cast<std::uint32_t>(offsets_[v + 1] - offsets_[v]);
  }
  bool has_edge(Vertex u, Vertex v) const;
  std::uint32_t max_degree() const;

  const std::vector<std::uint64_t>& offsets() const { return offsets_; }
  const std::vector<Vertex>& targets() const { return targets_; }

  /// Edges (u, v) with u < v in lexicographic order.
  std::vector<Edge> edge_list() const;

  /// Same graph with the given edges deleted. Missing edges are ignored.
  SparseGraph without_edges(std::span<const Edge> removed) const;

  friend bool operator==(const SparseGraph&, const SparseGraph&) = default;

 private:
  std::vector<std::uint64_t> offsets_;
  std::vector<Vertex> targets_;
};

/// Samples G(N, d/N) by geometric skipping over the linearized pair index,
/// O(N + E) expected work. Deterministic in (n, d, seed, replicate).
SparseGraph sample_er(const GraphConfig& config);

namespace detail {
/// Same sampler with a raw edge probability; p = 1 yields the complete
/// graph. Test hook for the degenerate endpoints.
SparseGraph sample_er_with_probability(std::uint64_t n, double p, std::uint64_t seed,
                                       std::uint32_t replicate);
}  // namespace detail

/// out[u] = sum of v[w] over neighbors w of u.
void matvec(const SparseGraph& g, std::span<const double> v, std::span<double> out);
std::vector<double> matvec(const SparseGraph& g, std::span<const double> v);

/// Expected degree counts mu_k = N Bin(k; N-1, d/N) and the benchmark
/// degree u_star = argmin_k max(mu_k, 1/mu_k), ties toward larger k.
struct DegreeBenchmark {
  int u_star = 0;
  std::vector<double> mu;  // mu[k] for k = 0..k_max
};

DegreeBenchmark degree_benchmark(std::uint64_t n, double d);

/// Connected components, numbered by smallest vertex. Members of component
/// c are `vertices[offsets[c] .. offsets[c+1])`, ascending.
struct Components {
  std::vector<std::uint32_t> label;
  std::vector<std::uint64_t> offsets;
  std::vector<Vertex> vertices;

  std::size_t count() const { return offsets.size() - 1; }
  std::span<const Vertex> members(std::size_t c) const {
    return {vertices.data() + offsets[c], vertices.data() + offsets[c + 1]};
  }
};

Components connected_components(const SparseGraph& g);

/// Subgraph induced on `vertices` (sorted ascending), relabelled 0..k-1 in
/// that order.
SparseGraph induced_subgraph(const SparseGraph& g, std::span<const Vertex> vertices);

}  // namespace sedge
