#pragma once

#include <string_view>
#include <vector>

#include "sedge/graph.hpp"
#include "sedge/local.hpp"

namespace sedge {

/// Top eigenpair of the adjacency matrix of a tree ball. `vector` is aligned
/// with `RootedBall::vertices` and has unit norm with a positive root entry.
struct BallEigenPair {
  double lambda = 0.0;
  std::vector<double> vector;
  int iterations = 0;
  double residual = 0.0;  // ||A_ball w - lambda w||
  double f_value = 0.0;   // continued-fraction equation at lambda
};

/// Solves lambda = sum over S_1 of 1 / (lambda - sum over children ...) for
/// the largest root. The search uses the sign pattern of the leaf-to-root
/// elimination pivots, which are all positive exactly when lambda exceeds
/// the top eigenvalue, so no division by a vanishing pivot is trusted.
/// Throws ValidationError on a non-tree ball.
BallEigenPair cf_eigenvalue(const RootedBall& ball, double tol = 1e-12);

enum class EstimatorKind { kStar, kTwoTerm, kFourTerm, kSimplified, kAdk };

std::string_view to_string(EstimatorKind kind);

struct EigenvalueEstimate {
  EstimatorKind kind = EstimatorKind::kStar;
  double value = 0.0;
  bool in_domain = true;  // false when a radicand of the adk formula is negative
};

/// Closed-form eigenvalue estimates from local statistics:
///   star        sqrt(a)
///   two_term    sqrt(a + b/a)
///   four_term   sqrt(a + b/a + (b11 + b2)/a^2 - b^2/a^3)
///   simplified  sqrt(a + b/a + (d^2 + d)/a)
///   adk         a / sqrt(a - (b/2a)(a/d + b/(ad)) + (b/2a) sqrt((a/d + b/(da))^2 - 4a/d))
/// Throws ValidationError when alpha = 0 or four_term lacks beta11.
EigenvalueEstimate estimate(const LocalStats& stats, double d, EstimatorKind kind);

/// Level norms of a ball eigenvector next to the localization predictions.
/// Predictions on spheres are (d/a)^{(i-1)/2}/sqrt(2), at the root
/// 1/sqrt(2), and for the part outside B_i
/// sqrt(1/(1 - d/a)) (d/a)^{i/2}/sqrt(2) (NaN when a <= d).
struct DecayProfile {
  std::vector<double> level_mass;      // ||w|S_i||, i = 0..r
  std::vector<double> tail_mass;       // ||w|ball \ B_i||, i = 0..r
  std::vector<double> predicted_level;
  std::vector<double> predicted_tail;
};

DecayProfile decay_profile(const BallEigenPair& pair, const RootedBall& ball, double d);

/// 2 sqrt(Delta - 1), the spectral radius bound for forests of max degree
/// Delta >= 2. Throws ValidationError below 2.
double forest_bound(int max_degree);

/// ||(A_G - A_ball) w|| for the ball eigenvector w, i.e. the mass pushed out
/// of the ball along edges leaving the outer sphere.
double truncation_residual(const SparseGraph& g, const RootedBall& ball, const BallEigenPair& pair);

/// constant * (d^{r/2} + 1) * u^{-(r-1)/2}
double truncation_envelope(double d, int u_star, int r, double constant = 4.0);

}  // namespace sedge
