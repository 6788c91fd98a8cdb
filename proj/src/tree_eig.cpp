#include "sedge/tree_eig.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

#include "sedge/errors.hpp"

namespace sedge {

namespace {

// Leaf-to-root elimination of (lambda I - A) on a tree. Children always sit
// at larger positions than their parent, so a reverse sweep is bottom-up.
struct Elimination {
  bool above_top = false;  // every pivot > 0
  double f = 0.0;          // root pivot
  double df = 0.0;         // derivative of the root pivot
};

Elimination eliminate(const RootedBall& ball, double lambda, std::vector<double>& pivot,
                      std::vector<double>& dpivot) {
  const auto n = static_cast<std::uint32_t>(ball.size());
  pivot.assign(n, lambda);
  dpivot.assign(n, 1.0);
  Elimination out;
  bool ok = true;
  for (std::uint32_t i = n; i-- > 1;) {
    if (!(pivot[i] > 0.0)) {
      ok = false;
    }
    const std::uint32_t p = ball.parent[i];
    const double g = 1.0 / pivot[i];
    pivot[p] -= g;
    dpivot[p] += dpivot[i] * g * g;
  }
  out.f = pivot[0];
  out.df = dpivot[0];
  out.above_top = ok && pivot[0] > 0.0;
  return out;
}

}  // namespace

BallEigenPair cf_eigenvalue(const RootedBall& ball, double tol) {
  if (!ball.is_tree) {
    throw ValidationError("cf_eigenvalue needs a tree ball (root " + std::to_string(ball.root) +
                          " has " + std::to_string(ball.intra_ball_edges) + " edges on " +
                          std::to_string(ball.size()) + " vertices)");
  }
  BallEigenPair out;
  const auto n = static_cast<std::uint32_t>(ball.size());
  if (n == 1) {
    out.lambda = 0.0;
    out.vector = {1.0};
    return out;
  }

  std::vector<double> pivot;
  std::vector<double> dpivot;
  const double alpha = static_cast<double>(ball.level_size(1));
  std::uint32_t max_children = 0;
  for (std::uint32_t c : ball.child_counts) {
    max_children = std::max(max_children, c);
  }

  // The star on S_1 is a subgraph, so lambda >= sqrt(alpha).
  double lo = std::sqrt(alpha) * (1.0 - 1e-12);
  double hi = std::sqrt(alpha + static_cast<double>(max_children) * ball.radius);
  int evals = 0;
  while (eliminate(ball, lo, pivot, dpivot).above_top) {
    lo *= 0.5;
    ++evals;
  }
  while (!eliminate(ball, hi, pivot, dpivot).above_top) {
    lo = hi;
    hi *= 2.0;
    ++evals;
    if (evals > 200 || !std::isfinite(hi)) {
      throw std::runtime_error("cf_eigenvalue failed to bracket: [" + std::to_string(lo) + ", " +
                               std::to_string(hi) + "]");
    }
  }

  // Bisection down to adjacent doubles, keeping hi on the side above the
  // top eigenvalue.
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      break;
    }
    ++evals;
    if (eliminate(ball, mid, pivot, dpivot).above_top) {
      hi = mid;
    } else {
      lo = mid;
    }
  }

  double lambda = hi;
  Elimination e = eliminate(ball, lambda, pivot, dpivot);
  // Newton polish on the root pivot; accepted only if it stays in the
  // bracket and improves |f|.
  for (int step = 0; step < 3 && std::abs(e.f) > tol; ++step) {
    const double next = lambda - e.f / e.df;
    if (!(next >= lo && next <= hi)) {
      break;
    }
    const Elimination en = eliminate(ball, next, pivot, dpivot);
    ++evals;
    if (std::abs(en.f) >= std::abs(e.f)) {
      break;
    }
    lambda = next;
    e = en;
  }
  eliminate(ball, lambda, pivot, dpivot);
  out.lambda = lambda;
  out.f_value = e.f;
  out.iterations = evals;

  // Top-down reconstruction: w_v = w_parent / pivot_v.
  out.vector.assign(n, 0.0);
  out.vector[0] = 1.0;
  for (std::uint32_t i = 1; i < n; ++i) {
    out.vector[i] = out.vector[ball.parent[i]] / pivot[i];
  }
  double norm = 0.0;
  for (double x : out.vector) {
    norm += x * x;
  }
  norm = std::sqrt(norm);
  for (double& x : out.vector) {
    x /= norm;
  }

  std::vector<double> aw(n, 0.0);
  for (std::uint32_t i = 1; i < n; ++i) {
    aw[i] += out.vector[ball.parent[i]];
    aw[ball.parent[i]] += out.vector[i];
  }
  double res = 0.0;
  for (std::uint32_t i = 0; i < n; ++i) {
    const double diff = aw[i] - lambda * out.vector[i];
    res += diff * diff;
  }
  out.residual = std::sqrt(res);
  return out;
}

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kStar:
      return "star";
    case EstimatorKind::kTwoTerm:
      return "two_term";
    case EstimatorKind::kFourTerm:
      return "four_term";
    case EstimatorKind::kSimplified:
      return "simplified";
    case EstimatorKind::kAdk:
      return "adk";
  }
  return "unknown";
}

EigenvalueEstimate estimate(const LocalStats& stats, double d, EstimatorKind kind) {
  if (stats.alpha == 0) {
    throw ValidationError("estimate needs alpha > 0");
  }
  const double a = static_cast<double>(stats.alpha);
  const double b = static_cast<double>(stats.beta);
  EigenvalueEstimate est;
  est.kind = kind;
  switch (kind) {
    case EstimatorKind::kStar:
      est.value = std::sqrt(a);
      break;
    case EstimatorKind::kTwoTerm:
      est.value = std::sqrt(a + b / a);
      break;
    case EstimatorKind::kFourTerm: {
      if (!stats.beta11) {
        throw ValidationError("four_term estimate needs beta11 (ball radius >= 3)");
      }
      const double b11 = static_cast<double>(*stats.beta11);
      const double b2 = static_cast<double>(stats.beta2);
      est.value = std::sqrt(a + b / a + (b11 + b2) / (a * a) - b * b / (a * a * a));
      break;
    }
    case EstimatorKind::kSimplified:
      est.value = std::sqrt(a + b / a + (d * d + d) / a);
      break;
    case EstimatorKind::kAdk: {
      if (!(d > 0.0)) {
        throw ValidationError("adk estimate needs d > 0");
      }
      const double half = b / (2.0 * a);
      const double s = a / d + b / (a * d);
      const double inner = s * s - 4.0 * a / d;
      if (inner < 0.0) {
        est.in_domain = false;
        est.value = std::numeric_limits<double>::quiet_NaN();
        break;
      }
      const double outer = a - half * s + half * std::sqrt(inner);
      if (!(outer > 0.0)) {
        est.in_domain = false;
        est.value = std::numeric_limits<double>::quiet_NaN();
        break;
      }
      est.value = a / std::sqrt(outer);
      break;
    }
  }
  return est;
}

DecayProfile decay_profile(const BallEigenPair& pair, const RootedBall& ball, double d) {
  if (pair.vector.size() != ball.size()) {
    throw ValidationError("eigenpair does not belong to this ball");
  }
  DecayProfile p;
  const int r = ball.radius;
  std::vector<double> sq(static_cast<std::size_t>(r) + 1, 0.0);
  for (int i = 0; i <= r; ++i) {
    for (std::uint32_t k = ball.level_start[i]; k < ball.level_start[i + 1]; ++k) {
      sq[i] += pair.vector[k] * pair.vector[k];
    }
    p.level_mass.push_back(std::sqrt(sq[i]));
  }
  for (int i = 0; i <= r; ++i) {
    double tail = 0.0;
    for (int j = i + 1; j <= r; ++j) {
      tail += sq[j];
    }
    p.tail_mass.push_back(std::sqrt(tail));
  }
  const double a = static_cast<double>(ball.level_size(1));
  const double ratio = a > 0.0 ? d / a : std::numeric_limits<double>::quiet_NaN();
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i <= r; ++i) {
    p.predicted_level.push_back(i == 0 ? inv_sqrt2 : std::pow(ratio, (i - 1) / 2.0) * inv_sqrt2);
    p.predicted_tail.push_back(ratio < 1.0
                                   ? std::sqrt(1.0 / (1.0 - ratio)) * std::pow(ratio, i / 2.0) * inv_sqrt2
                                   : std::numeric_limits<double>::quiet_NaN());
  }
  return p;
}

double forest_bound(int max_degree) {
  // A single edge (Delta = 1) has lambda = 1 > 0, so the bound starts at 2.
  if (max_degree < 2) {
    throw ValidationError("forest_bound needs max degree >= 2");
  }
  return 2.0 * std::sqrt(static_cast<double>(max_degree - 1));
}

double truncation_residual(const SparseGraph& g, const RootedBall& ball, const BallEigenPair& pair) {
  if (pair.vector.size() != ball.size()) {
    throw ValidationError("eigenpair does not belong to this ball");
  }
  std::unordered_map<Vertex, double> outside;
  for (std::uint32_t i = 0; i < ball.size(); ++i) {
    for (Vertex w : g.neighbors(ball.vertices[i])) {
      if (!ball.index_of(w)) {
        outside[w] += pair.vector[i];
      }
    }
  }
  double sum = 0.0;
  for (const auto& [v, x] : outside) {
    sum += x * x;
  }
  return std::sqrt(sum);
}

double truncation_envelope(double d, int u_star, int r, double constant) {
  return constant * (std::pow(d, r / 2.0) + 1.0) * std::pow(static_cast<double>(u_star), -(r - 1) / 2.0);
}

}  // namespace sedge
