#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "sedge/graph.hpp"
#include "sedge/local.hpp"
#include "sedge/tree_eig.hpp"

namespace sedge {

/// Sparse unit vector over global vertex ids; `index` is ascending.
struct SparseVector {
  std::vector<Vertex> index;
  std::vector<double> value;

  double at(Vertex v) const;
};

struct SpectralResult {
  std::vector<double> eigenvalues;          // descending (ascending for bottom_k)
  std::vector<SparseVector> eigenvectors;
  std::vector<double> residuals;            // ||A v - lambda v||, explicit
  std::vector<bool> converged;
  std::vector<bool> unresolved_cluster;     // neighbor within 10 tol
  std::uint64_t matvec_count = 0;
  double tol = 0.0;
};

struct LanczosOptions {
  double tol = 1e-10;                  // on ||A x - theta x|| / max(1, |theta|)
  std::uint64_t max_matvecs = 200000;
  std::uint64_t seed = 0;
  std::uint32_t replicate = 0;
  int basis_size = 0;                  // 0: max(2k + 20, 40), capped at n
};

using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;

/// Dense result of a Lanczos run on an abstract symmetric operator.
struct LanczosResult {
  std::vector<double> values;               // descending
  std::vector<std::vector<double>> vectors;
  std::vector<double> residuals;
  std::vector<bool> converged;
  std::uint64_t matvecs = 0;
};

/// Largest `k` eigenpairs of a symmetric operator of dimension n by
/// thick-restart Lanczos with full (twice-applied) reorthogonalization.
/// Invariant subspaces are continued with fresh random directions, and a
/// final deflated run checks that no eigenvalue above the k-th was missed
/// (repeated eigenvalues). Pairs that miss the tolerance are returned with
/// converged = false and their best residual.
LanczosResult lanczos_top_k(const LinearOperator& op, std::size_t n, int k, const LanczosOptions& opt);

/// Top-k eigenpairs of A(g). The graph is split into connected components;
/// components are visited in decreasing order of a Collatz-Wielandt upper
/// bound on their top eigenvalue and skipped once the bound falls below the
/// current k-th value. Each visited component is solved by lanczos_top_k.
SpectralResult top_k(const SparseGraph& g, int k, const LanczosOptions& opt = {});

/// Most negative k eigenpairs of A(g), ascending.
SpectralResult bottom_k(const SparseGraph& g, int k, const LanczosOptions& opt = {});

/// Local data for one fine-regime vertex.
struct FineBall {
  RootedBall ball;
  BallEigenPair pair;
  LocalStats stats;
};

struct EigenVertexMatch {
  int rank = 0;                   // 1-based position in the spectrum
  double lambda = 0.0;
  Vertex vertex = 0;              // argmax |v_k|, smallest id on ties
  bool matched = false;           // argmax vertex is a fine-regime vertex
  double overlap = 0.0;           // ||v - w_+(x)|| after sign alignment
  int lex_rank = 0;               // 1 + #fine vertices strictly lex-greater in (alpha, beta)
  double formula_error = 0.0;     // |lambda - simplified estimate|
  bool lex_agreement = false;     // rank == lex_rank
  bool unresolved = false;        // eigenvalue within 10 tol of a neighbor
};

/// Matches every eigenpair to its heaviest vertex. `fine` must be sorted by
/// root id.
std::vector<EigenVertexMatch> match_eigenpairs(const SpectralResult& res, std::span<const FineBall> fine,
                                               double d);

}  // namespace sedge
