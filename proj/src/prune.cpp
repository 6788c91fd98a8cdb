#include "sedge/prune.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "sedge/local.hpp"

namespace sedge {

namespace {

std::uint64_t edge_key(Vertex a, Vertex b) {
  if (a > b) {
    std::swap(a, b);
  }
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

// G minus a growing set of deleted edges.
class MutableGraph {
 public:
  explicit MutableGraph(const SparseGraph& g) : g_(g) {}

  template <typename F>
  void for_each_neighbor(Vertex v, F&& f) const {
    for (Vertex w : g_.neighbors(v)) {
      if (removed_.empty() || removed_.count(edge_key(v, w)) == 0) {
        f(w);
      }
    }
  }

  void remove(Vertex a, Vertex b) { removed_.insert(edge_key(a, b)); }

  std::vector<Edge> removed_edges() const {
    std::vector<Edge> out;
    out.reserve(removed_.size());
    for (std::uint64_t k : removed_) {
      out.emplace_back(static_cast<Vertex>(k >> 32), static_cast<Vertex>(k & 0xFFFFFFFFu));
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  const SparseGraph& g_;
  std::unordered_set<std::uint64_t> removed_;
};

struct LocalBfs {
  std::vector<Vertex> order;
  std::unordered_map<Vertex, std::pair<int, Vertex>> info;  // vertex -> (depth, level-1 ancestor)
};

// BFS to `depth` from x; neighbors are visited in ascending id order.
LocalBfs bfs(const MutableGraph& g, Vertex x, int depth) {
  LocalBfs b;
  b.order.push_back(x);
  b.info[x] = {0, x};
  for (std::size_t head = 0; head < b.order.size(); ++head) {
    const Vertex v = b.order[head];
    const auto [dv, anc] = b.info[v];
    if (dv == depth) {
      continue;
    }
    g.for_each_neighbor(v, [&](Vertex w) {
      if (b.info.count(w) == 0) {
        b.info[w] = {dv + 1, dv == 0 ? w : anc};
        b.order.push_back(w);
      }
    });
  }
  return b;
}

// Level-1 ancestor to cut when B_3(x) has a cycle, or x if it is a tree.
Vertex cycle_cut(const MutableGraph& g, Vertex x) {
  const LocalBfs b = bfs(g, x, 3);
  // A BFS tree on k vertices has k-1 edges; any further edge inside the
  // ball closes a cycle. Tree edges join depth i and i+1 with the deeper
  // vertex's parent; count per vertex how many shallower neighbors it has.
  Vertex best = x;
  int best_depth = -1;
  Vertex best_vertex = 0;
  for (Vertex v : b.order) {
    const int dv = b.info.at(v).first;
    int up = 0;
    bool same_level = false;
    g.for_each_neighbor(v, [&](Vertex w) {
      const auto it = b.info.find(w);
      if (it == b.info.end()) {
        return;
      }
      if (it->second.first == dv - 1) {
        ++up;
      } else if (it->second.first == dv) {
        same_level = true;
      }
    });
    if (up > 1 || same_level) {
      if (dv > best_depth || (dv == best_depth && v < best_vertex)) {
        best_depth = dv;
        best_vertex = v;
        best = b.info.at(v).second;
      }
    }
  }
  return best;
}

// First step of a shortest path from x to another rough vertex within
// distance 6, or x if there is none.
Vertex overlap_cut(const MutableGraph& g, Vertex x, const std::vector<Vertex>& rough) {
  const LocalBfs b = bfs(g, x, 6);
  for (Vertex v : b.order) {
    if (v != x && std::binary_search(rough.begin(), rough.end(), v)) {
      return b.info.at(v).second;
    }
  }
  return x;
}

void check_postconditions(const PrunedGraph& pg) {
  const SparseGraph& h = pg.pruned;
  constexpr auto kFree = std::numeric_limits<Vertex>::max();
  std::vector<Vertex> owner(h.n_vertices(), kFree);
  for (Vertex x : pg.rough) {
    const RootedBall ball = extract_ball(h, x, 3);
    if (!ball.is_tree) {
      throw PrunePostconditionError("pruned 3-ball around " + std::to_string(x) + " is not a tree", x);
    }
    for (Vertex v : ball.vertices) {
      if (owner[v] != kFree) {
        throw PrunePostconditionError("pruned 3-balls around " + std::to_string(owner[v]) + " and " +
                                          std::to_string(x) + " meet at " + std::to_string(v),
                                      x);
      }
      owner[v] = x;
    }
  }
  const auto limit = static_cast<std::uint32_t>(pg.c1 + pg.c2 - 2);
  if (pg.removed_max_degree > limit) {
    Vertex worst = 0;
    std::unordered_map<Vertex, std::uint32_t> deg;
    for (const auto& [a, b] : pg.removed_edges) {
      if (++deg[a] > limit) {
        worst = a;
      }
      if (++deg[b] > limit) {
        worst = b;
      }
    }
    throw PrunePostconditionError("removed-edge graph has degree " + std::to_string(pg.removed_max_degree) +
                                      " > " + std::to_string(limit) + " at vertex " + std::to_string(worst),
                                  worst);
  }
}

}  // namespace

PrunedGraph prune(const SparseGraph& g, std::span<const Vertex> rough, int c1, int c2) {
  if (c1 < 2 || c2 < 5) {
    throw ValidationError("prune needs c1 >= 2 and c2 >= 5");
  }
  PrunedGraph pg;
  pg.base = &g;
  pg.c1 = c1;
  pg.c2 = c2;
  pg.rough.assign(rough.begin(), rough.end());
  std::sort(pg.rough.begin(), pg.rough.end());
  pg.rough.erase(std::unique(pg.rough.begin(), pg.rough.end()), pg.rough.end());
  for (Vertex x : pg.rough) {
    if (x >= g.n_vertices()) {
      throw ValidationError("rough vertex out of range");
    }
  }

  MutableGraph m(g);
  for (Vertex x : pg.rough) {
    for (Vertex y = cycle_cut(m, x); y != x; y = cycle_cut(m, x)) {
      m.remove(x, y);
      ++pg.cycle_removals;
    }
    for (Vertex y = overlap_cut(m, x, pg.rough); y != x; y = overlap_cut(m, x, pg.rough)) {
      m.remove(x, y);
      ++pg.overlap_removals;
    }
  }

  pg.removed_edges = m.removed_edges();
  pg.pruned = g.without_edges(pg.removed_edges);
  std::unordered_map<Vertex, std::uint32_t> deg;
  for (const auto& [a, b] : pg.removed_edges) {
    pg.removed_max_degree = std::max({pg.removed_max_degree, ++deg[a], ++deg[b]});
  }
  for (Vertex x : pg.rough) {
    const RootedBall ball = extract_ball(pg.pruned, x, 3);
    HatStats hs;
    hs.x = x;
    hs.alpha_hat = static_cast<std::uint32_t>(ball.level_size(1));
    hs.beta_hat = ball.level_size(2);
    for (int i = 0; i <= 3; ++i) {
      hs.spheres.push_back(ball.level_size(i));
    }
    pg.hat_stats.push_back(std::move(hs));
  }
  check_postconditions(pg);
  return pg;
}

RoughTestVector rough_test_vector(const PrunedGraph& pg, Vertex x, int sigma) {
  if (sigma != 1 && sigma != -1) {
    throw ValidationError("sigma must be +1 or -1");
  }
  if (!std::binary_search(pg.rough.begin(), pg.rough.end(), x)) {
    throw ValidationError("vertex " + std::to_string(x) + " is not in the rough set");
  }
  const RootedBall hat = extract_ball(pg.pruned, x, 2);
  const double a = static_cast<double>(hat.level_size(1));
  if (a == 0.0) {
    throw ValidationError("vertex " + std::to_string(x) + " is isolated after pruning");
  }
  const double b = static_cast<double>(hat.level_size(2));
  const double s = a + b / a;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  std::vector<std::pair<Vertex, double>> entries;
  entries.emplace_back(x, inv_sqrt2 * std::sqrt(a) / std::sqrt(s));
  for (Vertex v : hat.level(1)) {
    entries.emplace_back(v, inv_sqrt2 * sigma / std::sqrt(a));
  }
  for (Vertex v : hat.level(2)) {
    entries.emplace_back(v, inv_sqrt2 / std::sqrt(a * s));
  }
  std::sort(entries.begin(), entries.end());
  double norm = 0.0;
  for (const auto& e : entries) {
    norm += e.second * e.second;
  }
  norm = std::sqrt(norm);

  RoughTestVector out;
  for (const auto& [v, val] : entries) {
    out.vector.index.push_back(v);
    out.vector.value.push_back(val / norm);
  }

  const SparseGraph& g = *pg.base;
  const RootedBall full = extract_ball(g, x, 2);
  const LocalStats st = local_stats(full);
  const double alpha = static_cast<double>(st.alpha);
  out.lambda = sigma * std::sqrt(alpha + static_cast<double>(st.beta) / alpha);

  // A_G w - lambda w, accumulated over the support and its neighbors.
  std::unordered_map<Vertex, double> aw;
  for (std::size_t i = 0; i < out.vector.index.size(); ++i) {
    const Vertex v = out.vector.index[i];
    aw[v] -= out.lambda * out.vector.value[i];
    for (Vertex w : g.neighbors(v)) {
      aw[w] += out.vector.value[i];
    }
  }
  std::vector<std::pair<Vertex, double>> terms(aw.begin(), aw.end());
  std::sort(terms.begin(), terms.end());
  double res = 0.0;
  for (const auto& t : terms) {
    res += t.second * t.second;
  }
  out.residual = std::sqrt(res);
  return out;
}

}  // namespace sedge
