#include "sedge/pointproc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "sedge/errors.hpp"
#include "sedge/probdist.hpp"
#include "sedge/rng.hpp"

namespace sedge {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double kappa_level(std::uint64_t n) {
  return std::exp(std::pow(std::log(static_cast<double>(n)), 0.125));
}

IntensityRho build_rho(std::uint64_t n, double d, int u_star) {
  if (n < 2 || !(d > 0.0) || !std::isfinite(d) || u_star < 1) {
    throw ValidationError("build_rho needs N >= 2, d > 0, u* >= 1");
  }
  IntensityRho rho;
  rho.n_vertices = n;
  rho.d = d;
  rho.u_star = u_star;
  const double log_n = std::log(static_cast<double>(n));
  rho.ell_max = static_cast<int>(std::floor(2.0 * std::pow(log_n, 0.125)));
  const double u = u_star;
  const double slack = std::pow(u, 0.875);

  // (num, den) reduced -> atom, so equal s from different (alpha, beta) merge.
  std::map<std::pair<std::int64_t, std::int64_t>, RhoAtom> by_value;
  for (int l = 0; l <= rho.ell_max; ++l) {
    const std::int64_t alpha = u_star - l;
    if (alpha < 1) {
      break;
    }
    const double a = static_cast<double>(alpha);
    const double log_pa = log_pois_pmf(d, alpha);
    const auto beta_max = static_cast<std::int64_t>(std::floor(d * a + slack));
    for (std::int64_t beta = 0; beta <= beta_max; ++beta) {
      const double mass = std::exp(log_n + log_pa + log_pois_pmf(d * a, beta));
      if (!(mass >= rho.mass_cutoff)) {
        continue;
      }
      const std::int64_t num = alpha * alpha + beta;
      const std::int64_t den = alpha;
      const std::int64_t g = std::gcd(num, den);
      const auto key = std::make_pair(num / g, den / g);
      auto [it, fresh] = by_value.try_emplace(key);
      RhoAtom& atom = it->second;
      if (fresh) {
        atom.alpha = alpha;
        atom.beta = beta;
        atom.num = num;
        atom.den = den;
        atom.s = static_cast<double>(num) / static_cast<double>(den);
        atom.location = u * atom.s;
      }
      atom.mass += mass;
    }
  }
  for (auto& [key, atom] : by_value) {
    rho.atoms.push_back(atom);
  }
  std::sort(rho.atoms.begin(), rho.atoms.end(),
            [](const RhoAtom& x, const RhoAtom& y) { return x.num * y.den < y.num * x.den; });
  for (const RhoAtom& a : rho.atoms) {
    rho.total_mass += a.mass;
  }
  return rho;
}

double kappa(const IntensityRho& rho, double k) {
  if (!(k > 0.0)) {
    throw ValidationError("kappa needs k > 0");
  }
  if (rho.total_mass <= k) {
    return -kInf;
  }
  double tail = 0.0;
  double best = kInf;
  for (auto it = rho.atoms.rbegin(); it != rho.atoms.rend(); ++it) {
    tail += it->mass;
    if (tail > k) {
      break;
    }
    best = it->location;
  }
  return best;
}

std::string to_string(PointOrigin o) {
  return o == PointOrigin::kEmpiricalPhi ? "empirical_phi" : "sampled_psi";
}

PointProcessSample sample_psi(const IntensityRho& rho, std::uint64_t seed, std::uint32_t replicate) {
  Philox4x32 rng(seed, stream_id(StreamPurpose::kPsiSample, replicate));
  PointProcessSample out;
  out.origin = PointOrigin::kSampledPsi;
  for (const RhoAtom& a : rho.atoms) {
    if (!(a.mass > 0.0)) {
      continue;
    }
    std::poisson_distribution<std::int64_t> pois(a.mass);
    const std::int64_t count = pois(rng);
    out.points.insert(out.points.end(), static_cast<std::size_t>(count), a.location);
  }
  std::sort(out.points.begin(), out.points.end(), std::greater<>());
  return out;
}

PointProcessSample empirical_phi(std::span<const double> eigenvalues, double d, int u_star, double cut) {
  PointProcessSample out;
  out.origin = PointOrigin::kEmpiricalPhi;
  const double u = u_star;
  const double slack = 1e-12 * std::max(1.0, std::abs(cut));
  for (double lambda : eigenvalues) {
    if (!std::isfinite(lambda)) {
      throw ValidationError("empirical_phi got a non-finite eigenvalue");
    }
    const double p = u * lambda * lambda - (d * d + d);
    if (p >= cut - slack) {
      out.points.push_back(p);
    }
  }
  std::sort(out.points.begin(), out.points.end(), std::greater<>());
  return out;
}

namespace {

struct Atoms {
  std::vector<double> x;
  std::vector<double> w;
};

Atoms to_atoms(std::span<const double> pts) {
  std::vector<double> s(pts.begin(), pts.end());
  for (double v : s) {
    if (!std::isfinite(v)) {
      throw ValidationError("lp_distance needs finite points");
    }
  }
  std::sort(s.begin(), s.end());
  Atoms a;
  for (double v : s) {
    if (!a.x.empty() && a.x.back() == v) {
      a.w.back() += 1.0;
    } else {
      a.x.push_back(v);
      a.w.push_back(1.0);
    }
  }
  return a;
}

bool within(double y, double x, double eps) { return std::abs(y - x) <= eps * (1.0 + 1e-12); }

// sup over sets A of mu(A) - nu(A_eps). An optimal A is a set of mu atoms;
// sorted, the union of their eps-intervals only grows to the right, so a DP
// over "last chosen atom" is exact.
double excess(const Atoms& mu, const Atoms& nu, double eps) {
  const std::size_t n = mu.x.size();
  std::vector<double> best(n, 0.0);
  double top = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double own = 0.0;
    for (std::size_t t = 0; t < nu.x.size(); ++t) {
      if (within(nu.x[t], mu.x[j], eps)) {
        own += nu.w[t];
      }
    }
    double b = mu.w[j] - own;
    for (std::size_t i = 0; i < j; ++i) {
      double added = 0.0;
      for (std::size_t t = 0; t < nu.x.size(); ++t) {
        if (within(nu.x[t], mu.x[j], eps) && !within(nu.x[t], mu.x[i], eps) && nu.x[t] > mu.x[i]) {
          added += nu.w[t];
        }
      }
      b = std::max(b, best[i] + mu.w[j] - added);
    }
    best[j] = b;
    top = std::max(top, b);
  }
  return top;
}

}  // namespace

double lp_distance(std::span<const double> a, std::span<const double> b) {
  const Atoms mu = to_atoms(a);
  const Atoms nu = to_atoms(b);
  // Excess only changes where some |x - y| enters the neighborhood.
  std::vector<double> breaks{0.0};
  for (double x : mu.x) {
    for (double y : nu.x) {
      breaks.push_back(std::abs(x - y));
    }
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  breaks.push_back(kInf);

  auto e_at = [&](double eps) { return std::max(excess(mu, nu, eps), excess(nu, mu, eps)); };
  // Feasible on [breaks[i], breaks[i+1]) iff e_at(breaks[i]) < breaks[i+1];
  // this is monotone in i.
  std::size_t lo = 0;
  std::size_t hi = breaks.size() - 2;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (e_at(breaks[mid]) < breaks[mid + 1]) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return std::max(breaks[lo], e_at(breaks[lo]));
}

Interval order_stat_window(double d, std::int64_t a, std::int64_t zeta, std::int64_t k) {
  if (k < 1 || zeta < k) {
    throw ValidationError("order_stat_window needs zeta >= k >= 1");
  }
  const double m = d * static_cast<double>(a);
  if (!(m >= 1.0)) {
    throw ValidationError("order_stat_window needs d a >= 1");
  }
  const double lz = std::log(static_cast<double>(zeta));
  if (!(lz > 0.0)) {
    throw ValidationError("order_stat_window needs zeta > 1");
  }
  Interval w;
  w.hi = m + std::sqrt(2.0 * m * lz);
  const double shift = std::log(static_cast<double>(k)) + 0.5 * std::log(2.0) - std::log(sharp_tail_constant()) +
                       1.5 * std::log(lz);
  w.lo = w.hi - std::sqrt(m) * shift / std::sqrt(2.0 * lz);
  return w;
}

Spacing predicted_spacing(double d, int u_star, std::int64_t k, std::uint64_t n) {
  if (k < 1 || !(d > 0.0) || u_star < 1 || n < 16) {
    throw ValidationError("predicted_spacing needs k >= 1, d > 0, u* >= 1, N >= 16");
  }
  const double u = u_star;
  const double l3 = std::log(std::log(std::log(static_cast<double>(n))));
  const double lu = std::log(u / d);
  const double denom = lu * lu * lu * std::pow(static_cast<double>(k + 1), 3.0 * l3);
  Spacing s;
  s.beta_gap = std::sqrt(d * u) / denom;
  s.lambda_gap = std::sqrt(d) / (3.0 * u * denom);
  return s;
}

}  // namespace sedge
