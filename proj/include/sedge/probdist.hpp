#pragma once

#include <cstdint>
#include <optional>

namespace sedge {

// All pmfs and tails are evaluated in log space through lgamma; tails sum
// the smaller side of the distribution with a ratio recurrence.

double log_pois_pmf(double lambda, std::int64_t k);
double pois_pmf(double lambda, std::int64_t k);
/// log P(Pois(lambda) >= k); -inf when the tail is empty.
double log_pois_tail(double lambda, std::int64_t k);
double pois_tail(double lambda, std::int64_t k);

double log_binom_pmf(std::int64_t n, double p, std::int64_t k);
double binom_pmf(std::int64_t n, double p, std::int64_t k);
/// log P(Binom(n, p) >= k).
double log_binom_tail(std::int64_t n, double p, std::int64_t k);
double binom_tail(std::int64_t n, double p, std::int64_t k);

/// Poisson large-deviation rate (1 + delta) log(1 + delta) - delta.
double rate_h(double delta);

struct TailBoundResult {
  double lambda = 0.0;
  double delta = 0.0;
  double threshold = 0.0;  // lambda (1 + delta)
  bool integer_threshold = false;
  std::optional<double> exact;      // P(X >= threshold) when threshold <= 1e6
  std::optional<double> log_exact;
  double upper = 0.0;
  double log_upper = 0.0;
  std::optional<double> lower;      // only for integer thresholds
  std::optional<double> log_lower;
};

/// Upper bound exp(-lambda h(delta)) / sqrt(lambda min(delta, delta^2)) and,
/// for integer thresholds, the matching lower bound c * upper with the
/// calibrated constant below. Requires lambda >= 1 and delta >= 1/sqrt(lambda).
TailBoundResult sharp_pois_tail_bounds(double lambda, double delta);

/// Lower-bound constant: 0.9 times the smallest exact/upper ratio over
/// lambda in {10, 30, 100, 300, 1000} and every integer threshold with
/// delta in [lambda^{-1/2}, 3]. Computed on first use.
double sharp_tail_constant();

struct BinomPoisComparison {
  double binom_pmf = 0.0;
  double pois_pmf = 0.0;
  double ratio = 1.0;      // binom / pois
  double deviation = 0.0;  // |ratio - 1|
  double bound = 0.0;      // constant (k^2 + (np)^2 + 1) / n
};

/// Requires k <= sqrt(n) and np <= sqrt(n).
BinomPoisComparison binom_pois_compare(std::int64_t n, double p, std::int64_t k,
                                       double constant = 4.0);

/// exp(-tau log tau + tau log(np) + tau - np): the Chernoff bound for
/// P(Binom(n, p) >= tau) through its Poisson approximation. Requires
/// np <= sqrt(n), 0 < tau <= sqrt(n).
double binom_heavy_tail_bound(std::int64_t n, double p, double tau);

enum class TailSide { kUpper, kLower };

/// Upper side exp(-t^2 / (2 lambda + 2t/3)), lower side exp(-t^2 / (2 lambda)).
double bernstein_tail(double lambda, double t, TailSide side);

/// 2n exp(-c sqrt(t) / (d^3 + 1)); valid for t > n^{2/3}.
double weibull_sq_sum_bound(std::int64_t n, double d, double t, double c = 0.1);

/// I_p(q) = q log(q/p) + (1-q) log((1-q)/(1-p)).
double binom_relative_entropy(double p, double q);

/// exp(-n I_p(k/n)); bounds P(X >= k) for k > np and P(X <= k) for k < np.
double binom_chernoff_bound(std::int64_t n, double p, std::int64_t k);

/// exp(-tau log tau + c tau).
double binom_rel_ent_bound(double tau, double c);

}  // namespace sedge
