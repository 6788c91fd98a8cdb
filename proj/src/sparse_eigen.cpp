#include "sedge/sparse_eigen.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sedge/errors.hpp"
#include "sedge/rng.hpp"

namespace sedge {

double SparseVector::at(Vertex v) const {
  const auto it = std::lower_bound(index.begin(), index.end(), v);
  if (it == index.end() || *it != v) {
    return 0.0;
  }
  return value[static_cast<std::size_t>(it - index.begin())];
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct RunResult {
  std::vector<double> values;  // descending
  std::vector<VectorXd> vectors;
  std::vector<double> residuals;
  std::vector<bool> converged;
  std::uint64_t matvecs = 0;
  bool spanned_space = false;  // Krylov space exhausted the available dimension
};

class Context {
 public:
  Context(const LinearOperator& op, std::size_t n, const LanczosOptions& opt)
      : op_(op), n_(n), opt_(opt), rng_(opt.seed, stream_id(StreamPurpose::kLanczosStart, opt.replicate)) {}

  void apply(const VectorXd& x, VectorXd& y) {
    op_(std::span<const double>(x.data(), n_), std::span<double>(y.data(), n_));
    ++matvecs_;
  }

  void random_vector(VectorXd& x) {
    for (std::size_t i = 0; i < n_; ++i) {
      x[static_cast<Eigen::Index>(i)] = rng_.uniform() - 0.5;
    }
  }

  std::uint64_t matvecs() const { return matvecs_; }
  std::size_t n() const { return n_; }
  const LanczosOptions& opt() const { return opt_; }

 private:
  const LinearOperator& op_;
  std::size_t n_;
  const LanczosOptions& opt_;
  Philox4x32 rng_;
  std::uint64_t matvecs_ = 0;
};

void deflate(const std::vector<VectorXd>& locked, VectorXd& x) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& y : locked) {
      x -= y.dot(x) * y;
    }
  }
}

// Fresh unit vector orthogonal to the first `cols` basis columns and the
// locked vectors. Returns false when no direction is left.
bool fresh_direction(Context& ctx, const MatrixXd& V, Eigen::Index cols, const std::vector<VectorXd>& locked,
                     VectorXd& out) {
  for (int attempt = 0; attempt < 3; ++attempt) {
    ctx.random_vector(out);
    const double start = out.norm();
    for (int pass = 0; pass < 2; ++pass) {
      deflate(locked, out);
      if (cols > 0) {
        out -= V.leftCols(cols) * (V.leftCols(cols).transpose() * out);
      }
    }
    const double left = out.norm();
    if (left > 1e-8 * start) {
      out /= left;
      return true;
    }
  }
  return false;
}

RunResult lanczos_run(Context& ctx, int nev, const std::vector<VectorXd>& locked, std::uint64_t budget) {
  RunResult out;
  const auto n = static_cast<Eigen::Index>(ctx.n());
  const auto avail = n - static_cast<Eigen::Index>(locked.size());
  if (avail <= 0 || nev <= 0) {
    out.spanned_space = true;
    return out;
  }
  Eigen::Index m = ctx.opt().basis_size > 0 ? ctx.opt().basis_size : std::max<Eigen::Index>(2 * nev + 20, 40);
  m = std::max<Eigen::Index>(m, nev + 2);
  m = std::min(m, avail);
  nev = static_cast<int>(std::min<Eigen::Index>(nev, m));
  const double tol = ctx.opt().tol;
  const std::uint64_t start_matvecs = ctx.matvecs();

  MatrixXd V(n, m + 1);
  MatrixXd T = MatrixXd::Zero(m, m);
  VectorXd w(n);
  VectorXd col(n);
  if (!fresh_direction(ctx, V, 0, locked, col)) {
    out.spanned_space = true;
    return out;
  }
  V.col(0) = col;

  Eigen::Index j = 0;
  double anorm = 0.0;
  while (true) {
    double beta_last = 0.0;
    Eigen::Index size = m;
    for (; j < m; ++j) {
      ctx.apply(V.col(j), w);
      VectorXd h = V.leftCols(j + 1).transpose() * w;
      w -= V.leftCols(j + 1) * h;
      const VectorXd h2 = V.leftCols(j + 1).transpose() * w;
      w -= V.leftCols(j + 1) * h2;
      h += h2;
      deflate(locked, w);
      T.col(j).head(j + 1) = h;
      T.row(j).head(j + 1) = h.transpose();
      double beta = w.norm();
      anorm = std::max(anorm, std::abs(h[j]) + beta);
      if (beta <= 1e-12 * std::max(anorm, 1.0)) {
        // Invariant subspace: continue the basis with a new direction.
        beta = 0.0;
        if (!fresh_direction(ctx, V, j + 1, locked, col)) {
          size = j + 1;
          out.spanned_space = true;
          ++j;
          break;
        }
        V.col(j + 1) = col;
      } else {
        V.col(j + 1) = w / beta;
      }
      beta_last = beta;
    }

    Eigen::SelfAdjointEigenSolver<MatrixXd> es(T.topLeftCorner(size, size));
    const VectorXd& theta = es.eigenvalues();   // ascending
    const MatrixXd& S = es.eigenvectors();
    const int want = static_cast<int>(std::min<Eigen::Index>(nev, size));
    int converged = 0;
    for (int i = 0; i < want; ++i) {
      const Eigen::Index c = size - 1 - i;
      const double est = out.spanned_space ? 0.0 : std::abs(beta_last * S(size - 1, c));
      if (est <= tol * std::max(1.0, std::abs(theta[c]))) {
        ++converged;
      }
    }
    const bool out_of_budget = ctx.matvecs() - start_matvecs >= budget;
    if (converged == want || out_of_budget || out.spanned_space) {
      out.values.clear();
      out.vectors.clear();
      out.residuals.clear();
      out.converged.clear();
      bool all_good = true;
      for (int i = 0; i < want; ++i) {
        const Eigen::Index c = size - 1 - i;
        VectorXd x = V.leftCols(size) * S.col(c);
        x.normalize();
        ctx.apply(x, w);
        const double rq = x.dot(w);
        const double res = (w - rq * x).norm();
        const bool ok = res <= 10.0 * tol * std::max(1.0, std::abs(rq));
        all_good = all_good && ok;
        out.values.push_back(rq);
        out.vectors.push_back(std::move(x));
        out.residuals.push_back(res);
        out.converged.push_back(ok);
      }
      if (all_good || out_of_budget || out.spanned_space) {
        break;
      }
    }

    // Thick restart: keep the top p Ritz vectors and the residual direction.
    const Eigen::Index p = std::min<Eigen::Index>(size - 1, std::max<Eigen::Index>(nev + (size - nev) / 2, nev));
    MatrixXd keep = V.leftCols(size) * S.rightCols(p).rowwise().reverse();
    const VectorXd coupling = beta_last * S.row(size - 1).tail(p).reverse().transpose();
    const VectorXd residual_dir = V.col(size);
    V.leftCols(p) = keep;
    T.setZero();
    for (Eigen::Index i = 0; i < p; ++i) {
      T(i, i) = theta[size - 1 - i];
      T(p, i) = coupling[i];
      T(i, p) = coupling[i];
    }
    if (beta_last == 0.0) {
      if (!fresh_direction(ctx, V, p, locked, col)) {
        out.spanned_space = true;
        break;
      }
      V.col(p) = col;
    } else {
      V.col(p) = residual_dir;
    }
    j = p;
  }
  out.matvecs = ctx.matvecs() - start_matvecs;
  return out;
}

}  // namespace

LanczosResult lanczos_top_k(const LinearOperator& op, std::size_t n, int k, const LanczosOptions& opt) {
  if (k < 1) {
    throw ValidationError("lanczos_top_k needs k >= 1");
  }
  if (static_cast<std::size_t>(k) > n) {
    throw ValidationError("lanczos_top_k needs k <= n");
  }
  Context ctx(op, n, opt);
  RunResult run = lanczos_run(ctx, k, {}, opt.max_matvecs);

  // Repeated eigenvalues: a single Krylov sequence sees one vector per
  // eigenspace, so search the orthogonal complement of what was found.
  if (!run.spanned_space) {
    for (int guard = 0; guard < k; ++guard) {
      const std::uint64_t used = ctx.matvecs();
      if (used >= opt.max_matvecs) {
        break;
      }
      RunResult extra = lanczos_run(ctx, 1, run.vectors, opt.max_matvecs - used);
      if (extra.values.empty()) {
        break;
      }
      const double kth = run.values.back();
      const double slack = 10.0 * opt.tol * std::max(1.0, std::abs(kth));
      if (static_cast<int>(run.values.size()) == k && !(extra.values[0] > kth + slack)) {
        break;
      }
      run.values.push_back(extra.values[0]);
      run.vectors.push_back(std::move(extra.vectors[0]));
      run.residuals.push_back(extra.residuals[0]);
      run.converged.push_back(extra.converged[0]);
      std::vector<std::size_t> order(run.values.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return run.values[a] > run.values[b]; });
      RunResult sorted;
      for (std::size_t i = 0; i < order.size() && static_cast<int>(i) < k; ++i) {
        sorted.values.push_back(run.values[order[i]]);
        sorted.vectors.push_back(run.vectors[order[i]]);
        sorted.residuals.push_back(run.residuals[order[i]]);
        sorted.converged.push_back(run.converged[order[i]]);
      }
      run.values = std::move(sorted.values);
      run.vectors = std::move(sorted.vectors);
      run.residuals = std::move(sorted.residuals);
      run.converged = std::move(sorted.converged);
    }
  }

  LanczosResult res;
  res.values = run.values;
  res.residuals = run.residuals;
  res.converged = run.converged;
  res.matvecs = ctx.matvecs();
  for (auto& v : run.vectors) {
    res.vectors.emplace_back(v.data(), v.data() + v.size());
  }
  return res;
}

namespace {

// Collatz-Wielandt bound per component: for positive x,
// lambda_1(A) <= max_v ((A + I) x)_v / x_v - 1 within each component.
std::vector<double> component_bounds(const SparseGraph& g, const Components& comps) {
  const Vertex n = g.n_vertices();
  std::vector<double> x(n, 1.0);
  std::vector<double> y(n);
  for (int it = 0; it < 8; ++it) {
    matvec(g, x, y);
    double top = 0.0;
    for (Vertex v = 0; v < n; ++v) {
      y[v] += x[v];
      top = std::max(top, y[v]);
    }
    for (Vertex v = 0; v < n; ++v) {
      x[v] = y[v] / top;
    }
  }
  matvec(g, x, y);
  std::vector<double> bound(comps.count(), 0.0);
  for (Vertex v = 0; v < n; ++v) {
    const double ratio = y[v] / x[v];
    auto& b = bound[comps.label[v]];
    b = std::max(b, ratio);
  }
  for (auto& b : bound) {
    // Guard the last bits against rounding in the ratio.
    b = b * (1.0 + 1e-12) + 1e-12;
  }
  return bound;
}

struct Candidate {
  double value = 0.0;
  std::uint32_t component = 0;
  SparseVector vector;
  double residual = 0.0;
  bool converged = true;
};

SpectralResult extreme_k(const SparseGraph& g, int k, const LanczosOptions& opt, bool top) {
  if (k < 1 || k > 64) {
    throw ValidationError("spectrum size k must be in [1, 64]");
  }
  if (static_cast<std::uint64_t>(k) >= g.n_vertices()) {
    throw ValidationError("spectrum size k must be < N");
  }
  const Components comps = connected_components(g);
  const std::vector<double> bound = component_bounds(g, comps);
  std::vector<std::uint32_t> order(comps.count());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return bound[a] > bound[b]; });

  const double sign = top ? 1.0 : -1.0;
  std::vector<Candidate> best;  // sorted by sign * value descending
  std::uint64_t matvecs = 0;
  for (std::uint32_t c : order) {
    if (static_cast<int>(best.size()) == k && bound[c] <= sign * best.back().value) {
      break;
    }
    const auto members = comps.members(c);
    const SparseGraph sub = induced_subgraph(g, members);
    const int want = static_cast<int>(std::min<std::size_t>(k, members.size()));
    LinearOperator op = [&sub, sign](std::span<const double> in, std::span<double> out) {
      matvec(sub, in, out);
      if (sign < 0.0) {
        for (double& v : out) {
          v = -v;
        }
      }
    };
    LanczosResult lr = lanczos_top_k(op, members.size(), want, opt);
    matvecs += lr.matvecs;
    for (std::size_t i = 0; i < lr.values.size(); ++i) {
      Candidate cand;
      cand.value = sign * lr.values[i];
      cand.component = c;
      cand.residual = lr.residuals[i];
      cand.converged = lr.converged[i];
      const auto& vec = lr.vectors[i];
      std::size_t arg = 0;
      for (std::size_t t = 1; t < vec.size(); ++t) {
        if (std::abs(vec[t]) > std::abs(vec[arg])) {
          arg = t;
        }
      }
      const double flip = vec[arg] < 0.0 ? -1.0 : 1.0;
      for (std::size_t t = 0; t < vec.size(); ++t) {
        if (vec[t] != 0.0) {
          cand.vector.index.push_back(members[t]);
          cand.vector.value.push_back(flip * vec[t]);
        }
      }
      best.push_back(std::move(cand));
    }
    std::stable_sort(best.begin(), best.end(), [sign](const Candidate& a, const Candidate& b) {
      return sign * a.value > sign * b.value;
    });
    if (static_cast<int>(best.size()) > k) {
      best.resize(static_cast<std::size_t>(k));
    }
  }

  SpectralResult res;
  res.tol = opt.tol;
  res.matvec_count = matvecs;
  for (auto& c : best) {
    res.eigenvalues.push_back(c.value);
    res.residuals.push_back(c.residual);
    res.converged.push_back(c.converged);
    res.eigenvectors.push_back(std::move(c.vector));
  }
  const std::size_t count = res.eigenvalues.size();
  res.unresolved_cluster.assign(count, false);
  for (std::size_t i = 0; i + 1 < count; ++i) {
    const double gap = std::abs(res.eigenvalues[i] - res.eigenvalues[i + 1]);
    if (gap < 10.0 * opt.tol * std::max(1.0, std::abs(res.eigenvalues[i]))) {
      res.unresolved_cluster[i] = true;
      res.unresolved_cluster[i + 1] = true;
    }
  }
  return res;
}

}  // namespace

SpectralResult top_k(const SparseGraph& g, int k, const LanczosOptions& opt) {
  return extreme_k(g, k, opt, true);
}

SpectralResult bottom_k(const SparseGraph& g, int k, const LanczosOptions& opt) {
  return extreme_k(g, k, opt, false);
}

std::vector<EigenVertexMatch> match_eigenpairs(const SpectralResult& res, std::span<const FineBall> fine,
                                               double d) {
  std::vector<EigenVertexMatch> out;
  for (std::size_t k = 0; k < res.eigenvalues.size(); ++k) {
    const SparseVector& v = res.eigenvectors[k];
    EigenVertexMatch m;
    m.rank = static_cast<int>(k) + 1;
    m.lambda = res.eigenvalues[k];
    m.unresolved = res.unresolved_cluster[k];
    std::size_t arg = 0;
    for (std::size_t t = 1; t < v.value.size(); ++t) {
      if (std::abs(v.value[t]) > std::abs(v.value[arg])) {
        arg = t;
      }
    }
    if (v.value.empty()) {
      out.push_back(m);
      continue;
    }
    m.vertex = v.index[arg];
    const double flip = v.value[arg] < 0.0 ? -1.0 : 1.0;

    const auto it = std::lower_bound(fine.begin(), fine.end(), m.vertex,
                                     [](const FineBall& f, Vertex x) { return f.ball.root < x; });
    if (it == fine.end() || it->ball.root != m.vertex) {
      out.push_back(m);
      continue;
    }
    m.matched = true;
    const FineBall& fb = *it;

    // ||flip*v - w||^2 over the union of supports.
    double dot = 0.0;
    double wnorm = 0.0;
    for (std::size_t i = 0; i < fb.ball.size(); ++i) {
      const double wi = fb.pair.vector[i];
      wnorm += wi * wi;
      dot += wi * flip * v.at(fb.ball.vertices[i]);
    }
    double vnorm = 0.0;
    for (double x : v.value) {
      vnorm += x * x;
    }
    m.overlap = std::sqrt(std::max(0.0, vnorm + wnorm - 2.0 * dot));

    const auto key = std::make_pair(fb.stats.alpha, fb.stats.beta);
    int greater = 0;
    for (const auto& other : fine) {
      if (std::make_pair(other.stats.alpha, other.stats.beta) > key) {
        ++greater;
      }
    }
    m.lex_rank = greater + 1;
    m.lex_agreement = m.lex_rank == m.rank;
    if (fb.stats.alpha > 0) {
      m.formula_error = std::abs(m.lambda - estimate(fb.stats, d, EstimatorKind::kSimplified).value);
    }
    out.push_back(m);
  }
  return out;
}

}  // namespace sedge
