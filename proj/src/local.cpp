#include "sedge/local.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "sedge/errors.hpp"

namespace sedge {

int RootedBall::level_of(std::uint32_t index) const {
  const auto it = std::upper_bound(level_start.begin(), level_start.end(), index);
  return static_cast<int>(it - level_start.begin()) - 1;
}

std::optional<std::uint32_t> RootedBall::index_of(Vertex v) const {
  const auto it = std::lower_bound(lookup.begin(), lookup.end(), std::make_pair(v, std::uint32_t{0}));
  if (it == lookup.end() || it->first != v) {
    return std::nullopt;
  }
  return it->second;
}

RootedBall extract_ball(const SparseGraph& g, Vertex root, int r) {
  if (root >= g.n_vertices()) {
    throw ValidationError("ball root " + std::to_string(root) + " out of range");
  }
  if (r < 1) {
    throw ValidationError("ball radius must be >= 1");
  }
  RootedBall ball;
  ball.root = root;
  ball.radius = r;
  ball.vertices.push_back(root);
  ball.parent.push_back(RootedBall::kNoParent);
  ball.level_start = {0, 1};

  std::unordered_map<Vertex, std::uint32_t> index;
  index.emplace(root, 0);
  std::vector<std::pair<Vertex, std::uint32_t>> next;  // (vertex, parent index)
  for (int lvl = 0; lvl < r; ++lvl) {
    next.clear();
    const std::uint32_t begin = ball.level_start[lvl];
    const std::uint32_t end = ball.level_start[lvl + 1];
    // The current level is sorted by id, so the first discoverer of a new
    // vertex is its smallest-id neighbor on this level.
    for (std::uint32_t i = begin; i < end; ++i) {
      for (Vertex w : g.neighbors(ball.vertices[i])) {
        if (index.emplace(w, 0).second) {
          next.emplace_back(w, i);
        }
      }
    }
    std::sort(next.begin(), next.end());
    for (const auto& [w, par] : next) {
      index[w] = static_cast<std::uint32_t>(ball.vertices.size());
      ball.vertices.push_back(w);
      ball.parent.push_back(par);
    }
    ball.level_start.push_back(static_cast<std::uint32_t>(ball.vertices.size()));
  }

  const auto n = static_cast<std::uint32_t>(ball.vertices.size());
  ball.child_counts.assign(n, 0);
  for (std::uint32_t i = 1; i < n; ++i) {
    ++ball.child_counts[ball.parent[i]];
  }
  ball.child_start.assign(n, 0);
  for (std::uint32_t i = 1; i < n; ++i) {
    ball.child_start[i] = ball.child_start[i - 1] + ball.child_counts[i - 1];
  }
  ball.child_order.assign(n > 0 ? n - 1 : 0, 0);
  std::vector<std::uint32_t> fill(ball.child_start);
  for (std::uint32_t i = 1; i < n; ++i) {
    ball.child_order[fill[ball.parent[i]]++] = i;
  }

  std::uint64_t edges = 0;
  for (Vertex v : ball.vertices) {
    for (Vertex w : g.neighbors(v)) {
      if (w > v && index.count(w) != 0) {
        ++edges;
      }
    }
  }
  ball.intra_ball_edges = edges;
  ball.is_tree = edges + 1 == n;

  ball.lookup.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    ball.lookup.emplace_back(ball.vertices[i], i);
  }
  std::sort(ball.lookup.begin(), ball.lookup.end());
  return ball;
}

LocalStats local_stats(const RootedBall& ball) {
  LocalStats s;
  s.is_tree = ball.is_tree;
  for (int i = 0; i <= ball.radius; ++i) {
    s.sphere_sizes.push_back(ball.level_size(i));
  }
  s.alpha = ball.level_size(1);
  for (std::uint32_t i = ball.level_start[1]; i < ball.level_start[2]; ++i) {
    const std::uint64_t c = ball.child_counts[i];
    s.beta += c;
    s.beta2 += c * c;
  }
  if (ball.radius >= 3) {
    std::uint64_t b11 = 0;
    for (std::uint32_t i = ball.level_start[2]; i < ball.level_start[3]; ++i) {
      b11 += ball.child_counts[i];
    }
    s.beta11 = b11;
  }
  return s;
}

void write_local_stats_csv(std::ostream& out, std::span<const std::pair<Vertex, LocalStats>> rows,
                           int radius) {
  out << "vertex,alpha,beta,beta2,beta11";
  for (int i = 1; i <= radius; ++i) {
    out << ",s" << i;
  }
  out << ",is_tree\n";
  for (const auto& [v, s] : rows) {
    out << v << ',' << s.alpha << ',' << s.beta << ',' << s.beta2 << ',';
    if (s.beta11) {
      out << *s.beta11;
    }
    for (int i = 1; i <= radius; ++i) {
      out << ',';
      if (static_cast<std::size_t>(i) < s.sphere_sizes.size()) {
        out << s.sphere_sizes[i];
      }
    }
    out << ',' << (s.is_tree ? 1 : 0) << '\n';
  }
}

namespace {

bool contains(const std::vector<Vertex>& sorted, Vertex v) {
  return std::binary_search(sorted.begin(), sorted.end(), v);
}

int ceil_pow(int u, double e) {
  // Guard against pow returning k + 1e-15 for exact integer powers.
  const double x = std::pow(static_cast<double>(u), e);
  return static_cast<int>(std::ceil(x - 1e-9));
}

}  // namespace

bool RegimePartition::in_fine(Vertex v) const { return contains(fine, v); }
bool RegimePartition::in_intermediate(Vertex v) const { return contains(intermediate, v); }
bool RegimePartition::in_rough(Vertex v) const { return contains(rough, v); }

RegimePartition classify_regimes(const SparseGraph& g, int u_star) {
  if (u_star < 2) {
    throw ValidationError("classify_regimes needs u_star >= 2, got " + std::to_string(u_star));
  }
  RegimePartition part;
  part.u_star = u_star;
  part.m_fine = ceil_pow(u_star, 0.25);
  part.m_intermediate = ceil_pow(u_star, 2.0 / 3.0);
  part.m_rough = (u_star + 1) / 2;
  if (part.m_fine > part.m_intermediate || part.m_intermediate > part.m_rough) {
    throw ValidationError("regime thresholds not nested for u_star = " + std::to_string(u_star) +
                          " (m = " + std::to_string(part.m_fine) + ", " +
                          std::to_string(part.m_intermediate) + ", " + std::to_string(part.m_rough) +
                          ")");
  }
  const std::int64_t t_fine = u_star - part.m_fine;
  const std::int64_t t_inter = u_star - part.m_intermediate;
  const std::int64_t t_rough = u_star - part.m_rough;
  for (Vertex v = 0; v < g.n_vertices(); ++v) {
    const std::int64_t deg = g.degree(v);
    if (deg >= t_rough) {
      part.rough.push_back(v);
      part.rough_degree.push_back(static_cast<std::uint32_t>(deg));
    }
    if (deg >= t_inter) {
      part.intermediate.push_back(v);
    }
    if (deg >= t_fine) {
      part.fine.push_back(v);
    }
  }
  return part;
}

OmegaReport check_structure(const SparseGraph& g, int u_star, std::span<const Vertex> intermediate,
                            std::span<const Vertex> fine, int r, double d, double constant) {
  if (r < 1) {
    throw ValidationError("structural check radius must be >= 1");
  }
  OmegaReport rep;
  rep.radius = r;
  rep.constant = constant;
  rep.intermediate_roots = intermediate.size();
  rep.fine_roots = fine.size();
  rep.growth_violations_by_level.assign(static_cast<std::size_t>(r) + 1, 0);

  const double u = static_cast<double>(u_star);
  const std::unordered_set<Vertex> fine_set(fine.begin(), fine.end());
  const int big = r + 3;

  constexpr auto kFree = std::numeric_limits<Vertex>::max();
  std::vector<Vertex> owner(g.n_vertices(), kFree);
  std::vector<Vertex> overlapping;

  auto note = [](std::optional<OmegaViolation>& slot, const OmegaViolation& v) {
    if (!slot) {
      slot = v;
    }
  };

  auto check_root = [&](Vertex x, bool as_intermediate, bool as_fine) {
    const RootedBall ball = extract_ball(g, x, big);
    if (as_intermediate) {
      for (Vertex v : ball.vertices) {
        if (owner[v] == kFree) {
          owner[v] = x;
        } else if (owner[v] != x) {
          if (!rep.overlap_witness) {
            rep.overlap_witness = std::make_pair(std::min(owner[v], x), std::max(owner[v], x));
          }
          overlapping.push_back(owner[v]);
          overlapping.push_back(x);
        }
      }
      if (!ball.is_tree) {
        ++rep.non_tree_roots;
        if (!rep.non_tree_witness) {
          rep.non_tree_witness = x;
        }
      }
    }

    const double alpha = static_cast<double>(ball.level_size(1));
    // (3) sphere growth
    for (int i = 1; i <= r; ++i) {
      const double observed = std::abs(static_cast<double>(ball.level_size(i)) -
                                       std::pow(d, i - 1) * alpha);
      const double shape = std::pow(d, i - 1.5) + 1.0;
      bool bad = false;
      if (as_intermediate && observed > constant * shape * std::pow(u, 7.0 / 8.0)) {
        bad = true;
        note(rep.growth_witness, {x, i, 0, observed, constant * shape * std::pow(u, 7.0 / 8.0)});
      }
      if (as_fine && observed > constant * shape * std::pow(u, 2.0 / 3.0)) {
        bad = true;
        note(rep.growth_witness, {x, i, 0, observed, constant * shape * std::pow(u, 2.0 / 3.0)});
      }
      if (bad) {
        ++rep.growth_violations_by_level[i];
      }
    }

    // (4) child counts over B_{r+3}(x) minus the root. Vertices on the
    // outer sphere have no children inside the ball, so their count is
    // taken as degree - 1 (exact when the next level is also a tree).
    const double cap_v = std::pow(u, 0.75);
    const double cap_w = std::pow(u, 1.0 / 3.0);
    bool child_bad = false;
    for (std::uint32_t i = 1; i < ball.size(); ++i) {
      const double ny = ball.level_of(i) < big ? static_cast<double>(ball.child_counts[i])
                                               : static_cast<double>(g.degree(ball.vertices[i])) - 1.0;
      if (as_intermediate && ny > cap_v) {
        child_bad = true;
        note(rep.child_witness, {x, 0, ball.vertices[i], ny, cap_v});
      }
      if (as_fine && ny > cap_w) {
        child_bad = true;
        note(rep.child_witness, {x, 0, ball.vertices[i], ny, cap_w});
      }
    }
    if (child_bad) {
      ++rep.child_violations;
    }

    // (5) second moment of child counts on S_1
    double sum_sq = 0.0;
    for (std::uint32_t i = ball.level_start[1]; i < ball.level_start[2]; ++i) {
      const double c = ball.child_counts[i];
      sum_sq += c * c;
    }
    const double dev = std::abs(sum_sq - (d * d + d) * alpha);
    bool moment_bad = false;
    if (as_intermediate && dev > constant * std::pow(u, 1.5)) {
      moment_bad = true;
      note(rep.moment_witness, {x, 0, 0, dev, constant * std::pow(u, 1.5)});
    }
    if (as_fine && dev > constant * std::pow(u, 2.0 / 3.0)) {
      moment_bad = true;
      note(rep.moment_witness, {x, 0, 0, dev, constant * std::pow(u, 2.0 / 3.0)});
    }
    if (moment_bad) {
      ++rep.moment_violations;
    }
  };

  for (Vertex x : intermediate) {
    check_root(x, true, fine_set.count(x) != 0);
  }
  const std::unordered_set<Vertex> inter_set(intermediate.begin(), intermediate.end());
  for (Vertex x : fine) {
    if (inter_set.count(x) == 0) {
      check_root(x, false, true);
    }
  }

  std::sort(overlapping.begin(), overlapping.end());
  overlapping.erase(std::unique(overlapping.begin(), overlapping.end()), overlapping.end());
  rep.overlapping_roots = overlapping.size();
  rep.disjoint = !rep.overlap_witness.has_value();
  rep.trees = rep.non_tree_roots == 0;
  rep.sphere_growth = !rep.growth_witness.has_value();
  rep.child_bound = rep.child_violations == 0;
  rep.second_moment = rep.moment_violations == 0;
  return rep;
}

OmegaReport check_omega(const SparseGraph& g, const RegimePartition& part, int r, double d,
                        double constant) {
  return check_structure(g, part.u_star, part.intermediate, part.fine, r, d, constant);
}

}  // namespace sedge
