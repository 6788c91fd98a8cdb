#include "sedge/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "sedge/errors.hpp"
#include "sedge/rng.hpp"

namespace sedge {

void GraphConfig::validate() const {
  if (n_vertices < 2) {
    throw ValidationError("graph needs at least 2 vertices, got " + std::to_string(n_vertices));
  }
  if (n_vertices > std::numeric_limits<Vertex>::max()) {
    throw ValidationError("vertex count exceeds 32-bit id space");
  }
  if (!(expected_degree >= 0.0) || !std::isfinite(expected_degree)) {
    throw ValidationError("expected degree must be a finite non-negative number");
  }
  if (edge_probability() >= 1.0) {
    throw ValidationError("edge probability d/N must be < 1");
  }
}

namespace {

void check_csr(const std::vector<std::uint64_t>& offsets, const std::vector<Vertex>& targets) {
  if (offsets.empty() || offsets.front() != 0 || offsets.back() != targets.size()) {
    throw ValidationError("malformed CSR offsets");
  }
  const auto n = static_cast<std::uint64_t>(offsets.size() - 1);
  for (std::uint64_t u = 0; u < n; ++u) {
    if (offsets[u] > offsets[u + 1]) {
      throw ValidationError("CSR offsets not monotone");
    }
    for (std::uint64_t i = offsets[u]; i < offsets[u + 1]; ++i) {
      const Vertex v = targets[i];
      if (v >= n) {
        throw ValidationError("neighbor id out of range");
      }
      if (v == u) {
        throw ValidationError("self-loop at vertex " + std::to_string(u));
      }
      if (i > offsets[u] && targets[i - 1] >= v) {
        throw ValidationError("neighbor list of vertex " + std::to_string(u) +
                              " not strictly increasing");
      }
    }
  }
  // Symmetry: every (u, v) has a matching (v, u).
  for (std::uint64_t u = 0; u < n; ++u) {
    for (std::uint64_t i = offsets[u]; i < offsets[u + 1]; ++i) {
      const Vertex v = targets[i];
      const auto first = targets.begin() + static_cast<std::ptrdiff_t>(offsets[v]);
      const auto last = targets.begin() + static_cast<std::ptrdiff_t>(offsets[v + 1]);
      if (!std::binary_search(first, last, static_cast<Vertex>(u))) {
        throw ValidationError("adjacency not symmetric at edge " + std::to_string(u) + "-" +
                              std::to_string(v));
      }
    }
  }
}

// Builds CSR from edges whose per-vertex insertion order is already sorted.
SparseGraph csr_from_ordered_edges(std::uint64_t n, const std::vector<Edge>& edges) {
  std::vector<std::uint64_t> offsets(n + 1, 0);
  for (const auto& [u, v] : edges) {
    ++offsets[u + 1];
    ++offsets[v + 1];
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<Vertex> targets(offsets.back());
  std::vector<std::uint64_t> cursor(offsets.begin(), offsets.end() - 1);
  for (const auto& [u, v] : edges) {
    targets[cursor[u]++] = v;
    targets[cursor[v]++] = u;
  }
  return SparseGraph::from_csr(std::move(offsets), std::move(targets));
}

}  // namespace

SparseGraph SparseGraph::from_csr(std::vector<std::uint64_t> offsets, std::vector<Vertex> targets) {
  check_csr(offsets, targets);
  SparseGraph g;
  g.offsets_ = std::move(offsets);
  g.targets_ = std::move(targets);
  return g;
}

SparseGraph SparseGraph::from_edges(std::uint64_t n_vertices, std::span<const Edge> edges) {
  if (n_vertices > std::numeric_limits<Vertex>::max()) {
    throw ValidationError("vertex count exceeds 32-bit id space");
  }
  std::vector<Edge> normalized;
  normalized.reserve(edges.size());
  for (auto [u, v] : edges) {
    if (u >= n_vertices || v >= n_vertices) {
      throw ValidationError("edge endpoint out of range: " + std::to_string(u) + " " +
                            std::to_string(v));
    }
    if (u == v) {
      throw ValidationError("self-loop at vertex " + std::to_string(u));
    }
    if (u > v) {
      std::swap(u, v);
    }
    normalized.emplace_back(u, v);
  }
  // Sorting by (larger, smaller) reproduces the sampler's insertion order,
  // which leaves every neighbor list sorted.
  std::sort(normalized.begin(), normalized.end(), [](const Edge& a, const Edge& b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  });
  if (std::adjacent_find(normalized.begin(), normalized.end()) != normalized.end()) {
    throw ValidationError("duplicate edge in input");
  }
  return csr_from_ordered_edges(n_vertices, normalized);
}

bool SparseGraph::has_edge(Vertex u, Vertex v) const {
  const auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::uint32_t SparseGraph::max_degree() const {
  std::uint32_t best = 0;
  for (Vertex v = 0; v < n_vertices(); ++v) {
    best = std::max(best, degree(v));
  }
  return best;
}

std::vector<Edge> SparseGraph::edge_list() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (Vertex u = 0; u < n_vertices(); ++u) {
    for (Vertex v : neighbors(u)) {
      if (u < v) {
        out.emplace_back(u, v);
      }
    }
  }
  return out;
}

SparseGraph SparseGraph::without_edges(std::span<const Edge> removed) const {
  std::vector<Edge> drop;
  drop.reserve(removed.size());
  for (auto [u, v] : removed) {
    drop.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(drop.begin(), drop.end());
  std::vector<std::uint64_t> offsets(offsets_.size(), 0);
  std::vector<Vertex> targets;
  targets.reserve(targets_.size());
  for (Vertex u = 0; u < n_vertices(); ++u) {
    for (Vertex v : neighbors(u)) {
      const Edge key{std::min(u, v), std::max(u, v)};
      if (!std::binary_search(drop.begin(), drop.end(), key)) {
        targets.push_back(v);
      }
    }
    offsets[u + 1] = targets.size();
  }
  SparseGraph g;
  g.offsets_ = std::move(offsets);
  g.targets_ = std::move(targets);
  return g;
}

namespace detail {

SparseGraph sample_er_with_probability(std::uint64_t n, double p, std::uint64_t seed,
                                       std::uint32_t replicate) {
  if (n < 2) {
    throw ValidationError("graph needs at least 2 vertices");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ValidationError("edge probability outside [0, 1]");
  }
  std::vector<Edge> edges;
  if (p > 0.0) {
    const double expected = p * static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
    edges.reserve(static_cast<std::size_t>(expected + 6.0 * std::sqrt(expected) + 16.0));
    Philox4x32 rng(seed, stream_id(StreamPurpose::kGraph, replicate));
    const double log_q = std::log1p(-p);
    // Batagelj-Brandes: walk the lower triangle (w < v) row by row, jumping
    // a geometric number of pairs between successive edges.
    std::uint64_t v = 1;
    std::int64_t w = -1;
    while (v < n) {
      const double skip = (p >= 1.0) ? 0.0 : std::floor(std::log(rng.uniform_open0()) / log_q);
      if (skip > 1e18) {
        break;
      }
      w += 1 + static_cast<std::int64_t>(skip);
      while (v < n && w >= static_cast<std::int64_t>(v)) {
        w -= static_cast<std::int64_t>(v);
        ++v;
      }
      if (v < n) {
        edges.emplace_back(static_cast<Vertex>(w), static_cast<Vertex>(v));
      }
    }
  }
  return csr_from_ordered_edges(n, edges);
}

}  // namespace detail

SparseGraph sample_er(const GraphConfig& config) {
  config.validate();
  return detail::sample_er_with_probability(config.n_vertices, config.edge_probability(),
                                            config.seed, config.replicate);
}

void matvec(const SparseGraph& g, std::span<const double> v, std::span<double> out) {
  const Vertex n = g.n_vertices();
  if (v.size() != n || out.size() != n) {
    throw ValidationError("matvec dimension mismatch: graph has " + std::to_string(n) +
                          " vertices, vector has " + std::to_string(v.size()));
  }
  const auto& offsets = g.offsets();
  const auto& targets = g.targets();
  for (Vertex u = 0; u < n; ++u) {
    double acc = 0.0;
    for (std::uint64_t i = offsets[u]; i < offsets[u + 1]; ++i) {
      acc += v[targets[i]];
    }
    out[u] = acc;
  }
}

std::vector<double> matvec(const SparseGraph& g, std::span<const double> v) {
  std::vector<double> out(g.n_vertices());
  matvec(g, v, out);
  return out;
}

DegreeBenchmark degree_benchmark(std::uint64_t n, double d) {
  if (n < 2 || !(d > 0.0) || !(d < static_cast<double>(n))) {
    throw ValidationError("degree_benchmark needs 0 < d < n");
  }
  const double nd = static_cast<double>(n);
  const double p = d / nd;
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  const double trials = nd - 1.0;
  const double mean = trials * p;
  const double base = std::log(nd) + std::lgamma(trials + 1.0);

  DegreeBenchmark out;
  for (std::uint64_t k = 0; k <= n - 1; ++k) {
    const double kd = static_cast<double>(k);
    const double log_mu =
        base - std::lgamma(kd + 1.0) - std::lgamma(trials - kd + 1.0) + kd * log_p + (trials - kd) * log_q;
    const double mu = std::exp(log_mu);
    out.mu.push_back(mu);
    if (kd >= mean && mu < 1e-6) {
      break;
    }
  }

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < out.mu.size(); ++k) {
    const double mu = out.mu[k];
    const double score = mu > 0.0 ? std::max(mu, 1.0 / mu) : std::numeric_limits<double>::infinity();
    if (score <= best) {
      best = score;
      out.u_star = static_cast<int>(k);
    }
  }
  if (out.u_star == 0) {
    out.u_star = 1;
  }
  return out;
}

Components connected_components(const SparseGraph& g) {
  const Vertex n = g.n_vertices();
  constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
  Components out;
  out.label.assign(n, kUnset);
  out.offsets.push_back(0);
  out.vertices.reserve(n);
  for (Vertex s = 0; s < n; ++s) {
    if (out.label[s] != kUnset) {
      continue;
    }
    const auto id = static_cast<std::uint32_t>(out.offsets.size() - 1);
    const std::size_t begin = out.vertices.size();
    out.vertices.push_back(s);
    out.label[s] = id;
    for (std::size_t head = begin; head < out.vertices.size(); ++head) {
      for (Vertex w : g.neighbors(out.vertices[head])) {
        if (out.label[w] == kUnset) {
          out.label[w] = id;
          out.vertices.push_back(w);
        }
      }
    }
    std::sort(out.vertices.begin() + static_cast<std::ptrdiff_t>(begin), out.vertices.end());
    out.offsets.push_back(out.vertices.size());
  }
  return out;
}

SparseGraph induced_subgraph(const SparseGraph& g, std::span<const Vertex> vertices) {
  std::vector<std::uint64_t> offsets(vertices.size() + 1, 0);
  std::vector<Vertex> targets;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    for (Vertex w : g.neighbors(vertices[i])) {
      const auto it = std::lower_bound(vertices.begin(), vertices.end(), w);
      if (it != vertices.end() && *it == w) {
        targets.push_back(static_cast<Vertex>(it - vertices.begin()));
      }
    }
    offsets[i + 1] = targets.size();
  }
  return SparseGraph::from_csr(std::move(offsets), std::move(targets));
}

}  // namespace sedge
