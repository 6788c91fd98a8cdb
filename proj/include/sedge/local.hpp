#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sedge/graph.hpp"

namespace sedge {

/// BFS ball B_r(root). Vertices are stored level by level, ascending id
/// within each level; all per-vertex arrays are indexed by position in
/// `vertices`. The parent of a vertex is its smallest-id neighbor on the
/// previous level, and child counts are taken with respect to those parents.
struct RootedBall {
  static constexpr std::uint32_t kNoParent = 0xFFFFFFFFu;

  Vertex root = 0;
  int radius = 0;
  std::vector<Vertex> vertices;
  std::vector<std::uint32_t> level_start;  // radius + 2 entries
  std::vector<std::uint32_t> parent;
  std::vector<std::uint32_t> child_counts;
  std::uint64_t intra_ball_edges = 0;
  bool is_tree = false;

  std::size_t size() const { return vertices.size(); }
  std::size_t level_size(int i) const { return level_start[i + 1] - level_start[i]; }
  std::span<const Vertex> level(int i) const {
    return {vertices.data() + level_start[i], level_size(i)};
  }
  int level_of(std::uint32_t index) const;

  /// Children of the vertex at `index`, as positions in `vertices`.
  std::span<const std::uint32_t> children(std::uint32_t index) const {
    return {child_order.data() + child_start[index], child_counts[index]};
  }

  /// Position of `v` in `vertices`, if present.
  std::optional<std::uint32_t> index_of(Vertex v) const;

  std::vector<std::uint32_t> child_start;
  std::vector<std::uint32_t> child_order;
  std::vector<std::pair<Vertex, std::uint32_t>> lookup;  // sorted by vertex
};

RootedBall extract_ball(const SparseGraph& g, Vertex root, int r);

/// Local statistics of a root. `beta` and `beta2` use child counts of S_1,
/// so they are zero when the ball radius is 1; `beta11` needs radius >= 3.
struct LocalStats {
  std::uint64_t alpha = 0;
  std::uint64_t beta = 0;
  std::uint64_t beta2 = 0;
  std::optional<std::uint64_t> beta11;
  std::vector<std::uint64_t> sphere_sizes;  // |S_0| .. |S_r|
  bool is_tree = false;
};

LocalStats local_stats(const RootedBall& ball);

/// Writes `vertex,alpha,beta,beta2,beta11,s1..s_r,is_tree` rows.
void write_local_stats_csv(std::ostream& out, std::span<const std::pair<Vertex, LocalStats>> rows,
                           int radius);

/// Degree classes X_m = {x : deg(x) >= u - m} for the three regimes. Member
/// lists are sorted ascending.
struct RegimePartition {
  int u_star = 0;
  int m_fine = 0;
  int m_intermediate = 0;
  int m_rough = 0;
  std::vector<Vertex> fine;
  std::vector<Vertex> intermediate;
  std::vector<Vertex> rough;
  std::vector<std::uint32_t> rough_degree;  // aligned with `rough`

  bool in_fine(Vertex v) const;
  bool in_intermediate(Vertex v) const;
  bool in_rough(Vertex v) const;
};

/// m = ceil(u^{1/4}), ceil(u^{2/3}), ceil(u/2). Throws ValidationError when
/// u < 2 or the thresholds are not nested (small u).
RegimePartition classify_regimes(const SparseGraph& g, int u_star);

struct OmegaViolation {
  Vertex root = 0;
  int level = 0;  // sphere index for growth checks, 0 otherwise
  Vertex at = 0;  // offending vertex for child-count checks
  double observed = 0.0;
  double allowed = 0.0;
};

/// Structural event report. Conditions are evaluated literally over every
/// root; the witness fields hold the first violation in ascending root order.
struct OmegaReport {
  int radius = 0;
  double constant = 4.0;
  std::size_t intermediate_roots = 0;
  std::size_t fine_roots = 0;

  bool disjoint = true;
  std::optional<std::pair<Vertex, Vertex>> overlap_witness;
  std::size_t overlapping_roots = 0;

  bool trees = true;
  std::optional<Vertex> non_tree_witness;
  std::size_t non_tree_roots = 0;

  bool sphere_growth = true;
  std::vector<std::size_t> growth_violations_by_level;  // index i = 1..r, slot 0 unused
  std::optional<OmegaViolation> growth_witness;

  bool child_bound = true;
  std::optional<OmegaViolation> child_witness;
  std::size_t child_violations = 0;

  bool second_moment = true;
  std::optional<OmegaViolation> moment_witness;
  std::size_t moment_violations = 0;

  bool all() const { return disjoint && trees && sphere_growth && child_bound && second_moment; }
};

/// Checks the five structural conditions with `intermediate` playing the
/// role of V (radius r+3 balls) and `fine` of W. `constant` multiplies the
/// envelopes of conditions (3) and (5); condition (4) has no constant.
OmegaReport check_structure(const SparseGraph& g, int u_star, std::span<const Vertex> intermediate,
                            std::span<const Vertex> fine, int r, double d, double constant = 4.0);

OmegaReport check_omega(const SparseGraph& g, const RegimePartition& part, int r, double d,
                        double constant = 4.0);

}  // namespace sedge
