#pragma once

// Reference implementations used only by the tests. They share no code with
// the library beyond the graph container and the RNG.

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <vector>

#include "sedge/graph.hpp"
#include "sedge/rng.hpp"

namespace oracle {

using sedge::Edge;
using sedge::SparseGraph;
using sedge::Vertex;

inline Eigen::MatrixXd dense_adjacency(const SparseGraph& g) {
  const Eigen::Index n = g.n_vertices();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [u, v] : g.edge_list()) {
    a(u, v) = 1.0;
    a(v, u) = 1.0;
  }
  return a;
}

// Eigenvalues ascending, eigenvectors in columns.
inline Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dense_eigen(const SparseGraph& g) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(dense_adjacency(g));
}

// Distances from root over the dense matrix; -1 beyond r or unreachable.
inline std::vector<int> dense_bfs(const Eigen::MatrixXd& a, Vertex root, int r) {
  const auto n = static_cast<std::size_t>(a.rows());
  std::vector<int> dist(n, -1);
  std::deque<std::size_t> q{root};
  dist[root] = 0;
  while (!q.empty()) {
    const std::size_t v = q.front();
    q.pop_front();
    if (dist[v] == r) {
      continue;
    }
    for (std::size_t w = 0; w < n; ++w) {
      if (a(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(w)) != 0.0 && dist[w] < 0) {
        dist[w] = dist[v] + 1;
        q.push_back(w);
      }
    }
  }
  return dist;
}

// Edge count of G(n, p) by flipping every pair.
inline std::uint64_t bernoulli_edge_count(std::uint64_t n, double p, std::uint64_t seed, std::uint32_t rep) {
  sedge::Philox4x32 rng(seed, sedge::stream_id(sedge::StreamPurpose::kTest, rep));
  std::uint64_t count = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    for (std::uint64_t j = i + 1; j < n; ++j) {
      count += rng.uniform() < p;
    }
  }
  return count;
}

// Random tree on n vertices: vertex i attaches to a uniform earlier vertex
// whose degree is still below max_degree.
inline std::vector<Edge> random_tree(std::uint32_t n, std::uint32_t max_degree, sedge::Philox4x32& rng) {
  std::vector<Edge> edges;
  std::vector<std::uint32_t> deg(n, 0);
  for (Vertex v = 1; v < n; ++v) {
    std::vector<Vertex> open;
    for (Vertex u = 0; u < v; ++u) {
      if (deg[u] < max_degree) {
        open.push_back(u);
      }
    }
    const Vertex u = open[rng() % open.size()];
    ++deg[u];
    ++deg[v];
    edges.emplace_back(u, v);
  }
  return edges;
}

using Big = boost::multiprecision::cpp_bin_float_50;

// P(Pois(lambda) >= k) by direct summation in 50-digit arithmetic.
inline double pois_tail(double lambda, std::int64_t k) {
  const Big l(lambda);
  Big term = exp(-l);
  Big below = 0;
  for (std::int64_t j = 0; j < k; ++j) {
    below += term;
    term *= l / Big(j + 1);
  }
  if (k <= static_cast<std::int64_t>(lambda)) {
    return static_cast<double>(Big(1) - below);
  }
  // Upper side: sum pmf(k), pmf(k+1), ... until negligible.
  Big above = 0;
  for (std::int64_t j = k;; ++j) {
    above += term;
    term *= l / Big(j + 1);
    if (term < above * Big(1e-40)) {
      break;
    }
  }
  return static_cast<double>(above);
}

inline double pois_pmf(double lambda, std::int64_t k) {
  const Big l(lambda);
  Big term = exp(-l);
  for (std::int64_t j = 0; j < k; ++j) {
    term *= l / Big(j + 1);
  }
  return static_cast<double>(term);
}

// log P(Pois(lambda) >= k) for k > lambda, summed in 50-digit arithmetic
// so that tails far below the double range stay representable.
inline double log_pois_upper_tail(double lambda, std::int64_t k) {
  const Big l(lambda);
  Big term = exp(-l);
  for (std::int64_t j = 0; j < k; ++j) {
    term *= l / Big(j + 1);
  }
  Big above = 0;
  for (std::int64_t j = k;; ++j) {
    above += term;
    term *= l / Big(j + 1);
    if (term < above * Big(1e-40)) {
      break;
    }
  }
  return static_cast<double>(log(above));
}

// Binom(n, p) pmf over Pois(np) pmf at k.
inline double binom_pois_ratio(std::int64_t n, double p, std::int64_t k) {
  const Big bp(p);
  const Big mean = Big(n) * bp;
  Big r = exp(mean) * pow(Big(1) - bp, n - k);
  for (std::int64_t j = 0; j < k; ++j) {
    r *= Big(n - j) / Big(n);
  }
  // C(n,k) p^k / (e^{-np} (np)^k / k!) = n!/(n-k)! / n^k * e^{np} (1-p)^{n-k}
  return static_cast<double>(r);
}

// P(Binom(n, p) >= k) by direct summation.
inline double binom_tail(std::int64_t n, double p, std::int64_t k) {
  const Big bp(p);
  const Big q = Big(1) - bp;
  Big term = pow(q, n);
  Big sum = 0;
  for (std::int64_t j = 0; j <= n; ++j) {
    if (j >= k) {
      sum += term;
    }
    term *= Big(n - j) / Big(j + 1) * bp / q;
  }
  return static_cast<double>(sum);
}

inline double binom_pmf(std::int64_t n, double p, std::int64_t k) {
  const Big bp(p);
  Big c = 1;
  for (std::int64_t j = 0; j < k; ++j) {
    c *= Big(n - j) / Big(j + 1);
  }
  return static_cast<double>(c * pow(bp, k) * pow(Big(1) - bp, n - k));
}

// Levy-Prokhorov distance between finite counting measures by enumerating
// every subset of atoms. Exponential; keep inputs to about a dozen atoms.
inline double lp_bruteforce(const std::vector<double>& a, const std::vector<double>& b) {
  auto atoms = [](const std::vector<double>& pts) {
    std::map<double, double> m;
    for (double x : pts) {
      m[x] += 1.0;
    }
    return std::vector<std::pair<double, double>>(m.begin(), m.end());
  };
  const auto mu = atoms(a);
  const auto nu = atoms(b);
  auto excess = [](const auto& p, const auto& q, double eps) {
    double best = 0.0;
    const std::size_t n = p.size();
    for (std::uint64_t mask = 1; mask < (1ULL << n); ++mask) {
      double mass = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask >> i & 1) {
          mass += p[i].second;
        }
      }
      double cover = 0.0;
      for (const auto& [y, w] : q) {
        for (std::size_t i = 0; i < n; ++i) {
          if ((mask >> i & 1) && std::abs(y - p[i].first) <= eps * (1 + 1e-12)) {
            cover += w;
            break;
          }
        }
      }
      best = std::max(best, mass - cover);
    }
    return best;
  };
  auto e = [&](double eps) { return std::max(excess(mu, nu, eps), excess(nu, mu, eps)); };
  std::vector<double> cand{0.0};
  for (const auto& [x, w] : mu) {
    for (const auto& [y, v] : nu) {
      cand.push_back(std::abs(x - y));
    }
  }
  const std::size_t base = cand.size();
  for (std::size_t i = 0; i < base; ++i) {
    cand.push_back(e(cand[i]));
  }
  double best = std::numeric_limits<double>::infinity();
  for (double c : cand) {
    if (c >= 0.0 && e(c) <= c * (1 + 1e-12) && c < best) {
      best = c;
    }
  }
  return best;
}

}  // namespace oracle
