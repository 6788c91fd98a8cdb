#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sedge/sparse_eigen.hpp"

namespace sedge {

/// One atom of rho at s = alpha + beta/alpha, stored as the exact fraction
/// num/den with num = alpha^2 + beta, den = alpha. Atoms with equal s are
/// merged; `alpha`/`beta` then name the first (alpha descending) pair.
struct RhoAtom {
  std::int64_t alpha = 0;
  std::int64_t beta = 0;
  std::int64_t num = 0;
  std::int64_t den = 1;
  double s = 0.0;
  double location = 0.0;  // u * s, the scale of Phi and Psi
  double mass = 0.0;
};

struct IntensityRho {
  std::uint64_t n_vertices = 0;
  double d = 0.0;
  int u_star = 0;
  int ell_max = 0;                   // floor(2 log^{1/8} N)
  double mass_cutoff = 1e-30;
  std::vector<RhoAtom> atoms;        // ascending location
  double total_mass = 0.0;
};

/// rho: for l = 0..ell_max, alpha = u - l >= 1 and integer
/// beta in [0, d alpha + u^{7/8}], mass N Pois(d; alpha) Pois(d alpha; beta).
IntensityRho build_rho(std::uint64_t n, double d, int u_star);

/// Smallest atom location whose closed upper tail rho([s, inf)) is <= k.
/// Returns -inf when the total mass is <= k and +inf when even the top atom
/// alone exceeds k.
double kappa(const IntensityRho& rho, double k);

/// K = exp(log^{1/8} N).
double kappa_level(std::uint64_t n);

enum class PointOrigin { kEmpiricalPhi, kSampledPsi };
std::string to_string(PointOrigin o);

struct PointProcessSample {
  std::vector<double> points;  // descending
  PointOrigin origin = PointOrigin::kSampledPsi;
};

/// Poisson(mass) copies of every atom location, drawn from the kPsiSample
/// stream of `seed` / `replicate`.
PointProcessSample sample_psi(const IntensityRho& rho, std::uint64_t seed, std::uint32_t replicate = 0);

/// Points u lambda^2 - (d^2 + d) that are >= cut (closed; a relative slack
/// of 1e-12 absorbs rounding at the boundary).
PointProcessSample empirical_phi(std::span<const double> eigenvalues, double d, int u_star, double cut);

/// Exact Levy-Prokhorov distance between two finite counting measures with
/// closed eps-neighborhoods. Bounded by the larger total mass (not by 1:
/// the +eps slack only caps it when both masses are <= 1).
double lp_distance(std::span<const double> a, std::span<const double> b);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Window for the k-th largest of zeta iid Pois(d a) values:
/// [m + sqrt(2 m log z) - sqrt(m)(log k + log2/2 - log c + 1.5 loglog z)/sqrt(2 log z),
///  m + sqrt(2 m log z)], m = d a, c = sharp_tail_constant().
Interval order_stat_window(double d, std::int64_t a, std::int64_t zeta, std::int64_t k);

struct Spacing {
  double beta_gap = 0.0;    // sqrt(d u) / (log(u/d)^3 (k+1)^{3 logloglog N})
  double lambda_gap = 0.0;  // sqrt(d) / (3 u log(u/d)^3 (k+1)^{3 logloglog N})
};

Spacing predicted_spacing(double d, int u_star, std::int64_t k, std::uint64_t n);

}  // namespace sedge
