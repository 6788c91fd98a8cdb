#include "sedge/probdist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sedge/errors.hpp"

namespace sedge {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log of sum_{j>=0} prod_{i<=j} ratio(i) (plus the leading 1). Callers only
// pass ratios <= 1, so the sum stays finite.
template <typename Ratio>
double log_series(Ratio ratio, std::int64_t max_terms) {
  double sum = 1.0;
  double term = 1.0;
  for (std::int64_t j = 0; j < max_terms; ++j) {
    term *= ratio(j);
    if (term == 0.0) {
      break;
    }
    sum += term;
    if (term < 1e-18 * sum) {
      break;
    }
  }
  return std::log(sum);
}

void check_lambda(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ValidationError("Poisson mean must be finite and >= 0");
  }
}

void check_binom(std::int64_t n, double p) {
  if (n < 0 || !(p >= 0.0 && p <= 1.0)) {
    throw ValidationError("binomial needs n >= 0 and p in [0, 1]");
  }
}

}  // namespace

double log_pois_pmf(double lambda, std::int64_t k) {
  check_lambda(lambda);
  if (k < 0) {
    return kNegInf;
  }
  if (lambda == 0.0) {
    return k == 0 ? 0.0 : kNegInf;
  }
  const double kd = static_cast<double>(k);
  return -lambda + kd * std::log(lambda) - std::lgamma(kd + 1.0);
}

double pois_pmf(double lambda, std::int64_t k) { return std::exp(log_pois_pmf(lambda, k)); }

double log_pois_tail(double lambda, std::int64_t k) {
  check_lambda(lambda);
  if (k <= 0) {
    return 0.0;
  }
  if (lambda == 0.0) {
    return kNegInf;
  }
  if (static_cast<double>(k) > lambda) {
    // Upper side: pmf(k) * (1 + lambda/(k+1) + ...).
    const double head = log_pois_pmf(lambda, k);
    const double tail = log_series([&](std::int64_t j) { return lambda / static_cast<double>(k + j + 1); },
                                   std::numeric_limits<std::int64_t>::max());
    return head + tail;
  }
  // Lower side: P(X <= k-1) = pmf(k-1) * (1 + (k-1)/lambda + ...).
  const double head = log_pois_pmf(lambda, k - 1);
  const double below = head + log_series([&](std::int64_t j) { return static_cast<double>(k - 1 - j) / lambda; }, k - 1);
  return std::log1p(-std::exp(below));
}

double pois_tail(double lambda, std::int64_t k) { return std::exp(log_pois_tail(lambda, k)); }

double log_binom_pmf(std::int64_t n, double p, std::int64_t k) {
  check_binom(n, p);
  if (k < 0 || k > n) {
    return kNegInf;
  }
  if (p == 0.0) {
    return k == 0 ? 0.0 : kNegInf;
  }
  if (p == 1.0) {
    return k == n ? 0.0 : kNegInf;
  }
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  return std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0) + kd * std::log(p) +
         (nd - kd) * std::log1p(-p);
}

double binom_pmf(std::int64_t n, double p, std::int64_t k) { return std::exp(log_binom_pmf(n, p, k)); }

double log_binom_tail(std::int64_t n, double p, std::int64_t k) {
  check_binom(n, p);
  if (k <= 0) {
    return 0.0;
  }
  if (k > n || p == 0.0) {
    return kNegInf;
  }
  if (p == 1.0) {
    return 0.0;
  }
  const double odds = p / (1.0 - p);
  const double mean = static_cast<double>(n) * p;
  if (static_cast<double>(k) > mean) {
    const double head = log_binom_pmf(n, p, k);
    const double tail = log_series(
        [&](std::int64_t j) {
          const std::int64_t i = k + j;
          return i >= n ? 0.0 : static_cast<double>(n - i) / static_cast<double>(i + 1) * odds;
        },
        n - k);
    return head + tail;
  }
  const double head = log_binom_pmf(n, p, k - 1);
  const double below = head + log_series(
                                  [&](std::int64_t j) {
                                    const std::int64_t i = k - 1 - j;  // pmf(i-1)/pmf(i)
                                    return static_cast<double>(i) / (static_cast<double>(n - i + 1) * odds);
                                  },
                                  k - 1);
  return std::log1p(-std::exp(below));
}

double binom_tail(std::int64_t n, double p, std::int64_t k) { return std::exp(log_binom_tail(n, p, k)); }

double rate_h(double delta) { return (delta + 1.0) * std::log1p(delta) - delta; }

namespace {

double log_sharp_upper(double lambda, double delta) {
  return -lambda * rate_h(delta) - 0.5 * std::log(lambda * std::min(delta, delta * delta));
}

double calibrate_sharp_constant() {
  double worst = std::numeric_limits<double>::infinity();
  for (double lambda : {10.0, 30.0, 100.0, 300.0, 1000.0}) {
    const double dmin = 1.0 / std::sqrt(lambda);
    const auto first = static_cast<std::int64_t>(std::ceil(lambda * (1.0 + dmin)));
    const auto last = static_cast<std::int64_t>(std::floor(lambda * 4.0));
    for (std::int64_t t = first; t <= last; ++t) {
      const double delta = static_cast<double>(t) / lambda - 1.0;
      if (delta < dmin || delta > 3.0) {
        continue;
      }
      const double log_ratio = log_pois_tail(lambda, t) - log_sharp_upper(lambda, delta);
      worst = std::min(worst, std::exp(log_ratio));
    }
  }
  return 0.9 * worst;
}

}  // namespace

double sharp_tail_constant() {
  static const double c = calibrate_sharp_constant();
  return c;
}

TailBoundResult sharp_pois_tail_bounds(double lambda, double delta) {
  if (!(lambda >= 1.0) || !std::isfinite(lambda)) {
    throw ValidationError("sharp Poisson tail bound needs lambda >= 1");
  }
  if (!(delta >= 1.0 / std::sqrt(lambda)) || !std::isfinite(delta)) {
    throw ValidationError("sharp Poisson tail bound needs delta >= 1/sqrt(lambda), got delta = " +
                          std::to_string(delta));
  }
  TailBoundResult r;
  r.lambda = lambda;
  r.delta = delta;
  r.threshold = lambda * (1.0 + delta);
  const double nearest = std::round(r.threshold);
  r.integer_threshold = std::abs(r.threshold - nearest) <= 1e-9 * std::max(1.0, r.threshold);
  r.log_upper = log_sharp_upper(lambda, delta);
  r.upper = std::exp(r.log_upper);
  if (r.threshold <= 1e6) {
    const auto k = r.integer_threshold ? static_cast<std::int64_t>(nearest)
                                       : static_cast<std::int64_t>(std::ceil(r.threshold));
    r.log_exact = log_pois_tail(lambda, k);
    r.exact = std::exp(*r.log_exact);
  }
  if (r.integer_threshold) {
    r.log_lower = std::log(sharp_tail_constant()) + r.log_upper;
    r.lower = std::exp(*r.log_lower);
  }
  return r;
}

BinomPoisComparison binom_pois_compare(std::int64_t n, double p, std::int64_t k, double constant) {
  check_binom(n, p);
  const double root_n = std::sqrt(static_cast<double>(n));
  const double mean = static_cast<double>(n) * p;
  if (n < 1 || k < 0 || static_cast<double>(k) > root_n || mean > root_n) {
    throw ValidationError("binom_pois_compare needs k, np <= sqrt(n)");
  }
  BinomPoisComparison c;
  const double lb = log_binom_pmf(n, p, k);
  const double lp = log_pois_pmf(mean, k);
  c.binom_pmf = std::exp(lb);
  c.pois_pmf = std::exp(lp);
  c.ratio = (lb == kNegInf && lp == kNegInf) ? 1.0 : std::exp(lb - lp);
  c.deviation = std::abs(c.ratio - 1.0);
  const double kd = static_cast<double>(k);
  c.bound = constant * (kd * kd + mean * mean + 1.0) / static_cast<double>(n);
  return c;
}

double binom_heavy_tail_bound(std::int64_t n, double p, double tau) {
  check_binom(n, p);
  const double root_n = std::sqrt(static_cast<double>(n));
  const double mean = static_cast<double>(n) * p;
  if (!(tau > 0.0) || tau > root_n || mean > root_n || !(mean > 0.0)) {
    throw ValidationError("binom_heavy_tail_bound needs 0 < np <= sqrt(n) and 0 < tau <= sqrt(n)");
  }
  return std::exp(-tau * std::log(tau) + tau * std::log(mean) + tau - mean);
}

double bernstein_tail(double lambda, double t, TailSide side) {
  if (!(lambda > 0.0) || !(t >= 0.0)) {
    throw ValidationError("bernstein_tail needs lambda > 0 and t >= 0");
  }
  const double denom = side == TailSide::kUpper ? 2.0 * lambda + 2.0 * t / 3.0 : 2.0 * lambda;
  return std::exp(-t * t / denom);
}

double weibull_sq_sum_bound(std::int64_t n, double d, double t, double c) {
  if (n < 1 || !(d > 0.0) || !(c > 0.0)) {
    throw ValidationError("weibull_sq_sum_bound needs n >= 1, d > 0, c > 0");
  }
  if (!(t > std::pow(static_cast<double>(n), 2.0 / 3.0))) {
    throw ValidationError("weibull_sq_sum_bound needs t > n^{2/3}");
  }
  return 2.0 * static_cast<double>(n) * std::exp(-c * std::sqrt(t) / (d * d * d + 1.0));
}

double binom_relative_entropy(double p, double q) {
  if (!(p > 0.0 && p < 1.0) || !(q >= 0.0 && q <= 1.0)) {
    throw ValidationError("relative entropy needs p in (0,1), q in [0,1]");
  }
  const double a = q > 0.0 ? q * std::log(q / p) : 0.0;
  const double b = q < 1.0 ? (1.0 - q) * std::log((1.0 - q) / (1.0 - p)) : 0.0;
  return a + b;
}

double binom_chernoff_bound(std::int64_t n, double p, std::int64_t k) {
  if (n < 1 || k < 0 || k > n) {
    throw ValidationError("binom_chernoff_bound needs 0 <= k <= n");
  }
  const double nd = static_cast<double>(n);
  return std::exp(-nd * binom_relative_entropy(p, static_cast<double>(k) / nd));
}

double binom_rel_ent_bound(double tau, double c) {
  if (!(tau > 0.0)) {
    throw ValidationError("binom_rel_ent_bound needs tau > 0");
  }
  return std::exp(-tau * std::log(tau) + c * tau);
}

}  // namespace sedge
