#include "sedge/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "sedge/errors.hpp"
#include "sedge/graph.hpp"
#include "sedge/pointproc.hpp"
#include "sedge/probdist.hpp"
#include "sedge/prune.hpp"
#include "sedge/rng.hpp"

#ifndef SEDGE_VERSION
#define SEDGE_VERSION "unknown"
#endif

namespace sedge {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

constexpr EstimatorKind kKinds[] = {EstimatorKind::kStar, EstimatorKind::kTwoTerm, EstimatorKind::kFourTerm,
                                    EstimatorKind::kSimplified, EstimatorKind::kAdk};

std::string fmt(double x) {
  if (std::isnan(x)) {
    return "nan";
  }
  if (std::isinf(x)) {
    return x > 0 ? "inf" : "-inf";
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// JSON has no NaN/inf; they become null.
json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    return "";
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T out{};
  in >> out;
  if (in.fail() || !in.eof()) {
    throw ValidationError("config key '" + key + "': cannot parse '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") {
    return true;
  }
  if (value == "false" || value == "0" || value == "no") {
    return false;
  }
  throw ValidationError("config key '" + key + "': expected a boolean, got '" + value + "'");
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) {
    return kNaN;
  }
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

std::string version_string() { return SEDGE_VERSION; }

double median(std::vector<double> v) {
  std::erase_if(v, [](double x) { return std::isnan(x); });
  return quantile(std::move(v), 0.5);
}

void ExperimentConfig::validate() const {
  GraphConfig{n_vertices, expected_degree, base_seed, 0}.validate();
  if (!(expected_degree > 0.0)) {
    throw ValidationError("expected_degree must be > 0");
  }
  if (n_seeds < 1) {
    throw ValidationError("n_seeds must be >= 1");
  }
  if (loc_radius < 0) {
    throw ValidationError("loc_radius must be >= 0");
  }
  if (loc_radius > 0 && radius < std::max(5, 2 * loc_radius)) {
    throw ValidationError("radius " + std::to_string(radius) + " must be >= max(5, 2 * loc_radius) = " +
                          std::to_string(std::max(5, 2 * loc_radius)));
  }
  if (radius < 3) {
    throw ValidationError("radius must be >= 3");
  }
  if (top_k < 3 || top_k > 64 || static_cast<std::uint64_t>(top_k) >= n_vertices) {
    throw ValidationError("top_k must be in [3, 64] and below N");
  }
  if (prune_c1 < 2 || prune_c2 < 5) {
    throw ValidationError("prune constants need c1 >= 2 and c2 >= 5");
  }
  if (!(lanczos_tol > 0.0) || !(omega_constant > 0.0) || !(truncation_constant > 0.0) ||
      !(rough_constant > 0.0)) {
    throw ValidationError("tolerances and envelope constants must be > 0");
  }
}

std::optional<std::string> ExperimentConfig::degree_range_warning() const {
  const double l = std::log(static_cast<double>(n_vertices));
  const double lo = std::pow(l, -1.0 / 9.0);
  const double hi = std::pow(l, 1.0 / 40.0);
  if (expected_degree < lo || expected_degree > hi) {
    return "d = " + fmt(expected_degree) + " is outside the supported range [" + fmt(lo) + ", " + fmt(hi) +
           "] for N = " + std::to_string(n_vertices);
  }
  return std::nullopt;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key == "n_vertices") {
    n_vertices = parse_number<std::uint64_t>(key, value);
  } else if (key == "expected_degree") {
    expected_degree = parse_number<double>(key, value);
  } else if (key == "n_seeds") {
    n_seeds = parse_number<std::uint32_t>(key, value);
  } else if (key == "base_seed") {
    base_seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "radius") {
    radius = parse_number<int>(key, value);
  } else if (key == "loc_radius") {
    loc_radius = parse_number<int>(key, value);
  } else if (key == "top_k") {
    top_k = parse_number<int>(key, value);
  } else if (key == "output_dir") {
    output_dir = value;
  } else if (key == "omega_constant") {
    omega_constant = parse_number<double>(key, value);
  } else if (key == "truncation_constant") {
    truncation_constant = parse_number<double>(key, value);
  } else if (key == "rough_constant") {
    rough_constant = parse_number<double>(key, value);
  } else if (key == "prune_c1") {
    prune_c1 = parse_number<int>(key, value);
  } else if (key == "prune_c2") {
    prune_c2 = parse_number<int>(key, value);
  } else if (key == "lanczos_tol") {
    lanczos_tol = parse_number<double>(key, value);
  } else if (key == "run_omega") {
    run_omega = parse_bool(key, value);
  } else if (key == "run_prune") {
    run_prune = parse_bool(key, value);
  } else if (key == "run_pointprocess") {
    run_pointprocess = parse_bool(key, value);
  } else {
    throw ValidationError("unknown config key '" + key + "'");
  }
}

json ExperimentConfig::to_json() const {
  return json{{"n_vertices", n_vertices},
              {"expected_degree", expected_degree},
              {"n_seeds", n_seeds},
              {"base_seed", base_seed},
              {"radius", radius},
              {"loc_radius", loc_radius},
              {"top_k", top_k},
              {"output_dir", output_dir},
              {"omega_constant", omega_constant},
              {"truncation_constant", truncation_constant},
              {"rough_constant", rough_constant},
              {"prune_c1", prune_c1},
              {"prune_c2", prune_c2},
              {"lanczos_tol", lanczos_tol},
              {"run_omega", run_omega},
              {"run_prune", run_prune},
              {"run_pointprocess", run_pointprocess}};
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open config file " + path.string());
  }
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    }
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

json pinned_constants() {
  return json{{"rng", Philox4x32::kName},
              {"rho_mass_cutoff", IntensityRho{}.mass_cutoff},
              {"sharp_tail_constant", sharp_tail_constant()},
              {"lp_neighborhoods", "closed"},
              {"kappa_convention", "smallest atom with closed upper tail <= K; -inf if total <= K, +inf if none"},
              {"phi_cut", "closed, relative slack 1e-12"},
              {"separation_factor", 10.0}};
}

SeedResult run_seed(const ExperimentConfig& cfg, std::uint32_t replicate) {
  cfg.validate();
  const double d = cfg.expected_degree;
  SeedResult out;
  out.replicate = replicate;

  const SparseGraph g = sample_er({cfg.n_vertices, d, cfg.base_seed, replicate});
  out.n_edges = g.edge_count();
  out.max_degree = g.max_degree();
  out.u_star = degree_benchmark(cfg.n_vertices, d).u_star;
  // Small u* can make the regime thresholds non-nested; the spectrum and
  // point process still make sense there, the regime stages do not.
  RegimePartition part;
  bool have_regimes = true;
  try {
    part = classify_regimes(g, out.u_star);
  } catch (const ValidationError& e) {
    have_regimes = false;
    out.regime_error = e.what();
  }
  out.n_fine = part.fine.size();
  out.n_intermediate = part.intermediate.size();
  out.n_rough = part.rough.size();

  if (cfg.run_omega && have_regimes) {
    out.omega = check_omega(g, part, cfg.radius, d, cfg.omega_constant);
  }

  std::vector<FineBall> fine_balls;
  for (Vertex x : part.fine) {
    EstimatorRow row;
    row.vertex = x;
    RootedBall ball = extract_ball(g, x, cfg.radius);
    row.stats = local_stats(ball);
    row.is_tree = ball.is_tree;
    row.lambda_cf = kNaN;
    row.truncation_residual = kNaN;
    for (EstimatorKind kind : kKinds) {
      try {
        row.estimates.push_back(estimate(row.stats, d, kind));
      } catch (const ValidationError&) {
        row.estimates.push_back({kind, kNaN, false});
      }
    }
    if (ball.is_tree) {
      BallEigenPair pair = cf_eigenvalue(ball);
      row.lambda_cf = pair.lambda;
      row.truncation_residual = truncation_residual(g, ball, pair);
      fine_balls.push_back({std::move(ball), std::move(pair), row.stats});
    }
    out.estimators.push_back(std::move(row));
  }

  LanczosOptions opt;
  opt.tol = cfg.lanczos_tol;
  opt.seed = cfg.base_seed;
  opt.replicate = replicate;
  out.spectrum = top_k(g, cfg.top_k, opt);
  out.matches = match_eigenpairs(out.spectrum, fine_balls, d);

  const auto& ev = out.spectrum.eigenvalues;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    const EigenVertexMatch& m = out.matches[i];
    MatchedStats ms;
    ms.rank = m.rank;
    ms.lambda = ev[i];
    ms.vertex = m.vertex;
    ms.stats = local_stats(extract_ball(g, m.vertex, 3));
    const double l2 = ev[i] * ev[i];
    if (ms.stats.alpha > 0) {
      const double a = static_cast<double>(ms.stats.alpha);
      const double b = static_cast<double>(ms.stats.beta);
      ms.simplified_error = std::abs(ev[i] - estimate(ms.stats, d, EstimatorKind::kSimplified).value);
      ms.sq_error_alpha = std::abs(l2 - a);
      ms.sq_error_two_term = std::abs(l2 - (a + b / a));
      const double f = estimate(ms.stats, d, EstimatorKind::kFourTerm).value;
      ms.sq_error_four_term = std::abs(l2 - f * f);
    } else {
      ms.simplified_error = ms.sq_error_alpha = ms.sq_error_two_term = ms.sq_error_four_term = kNaN;
    }
    out.matched.push_back(ms);

    LocalizationRow loc;
    loc.rank = m.rank;
    loc.lambda = ev[i];
    loc.vertex = m.vertex;
    loc.alpha = g.degree(m.vertex);
    const int rr = std::max(cfg.loc_radius, 2);
    const RootedBall ball = extract_ball(g, m.vertex, rr);
    loc.ball_is_tree = ball.is_tree;
    std::vector<double> sq(static_cast<std::size_t>(rr) + 1, 0.0);
    double outside = 0.0;
    const SparseVector& v = out.spectrum.eigenvectors[i];
    for (std::size_t t = 0; t < v.index.size(); ++t) {
      const double w2 = v.value[t] * v.value[t];
      if (const auto idx = ball.index_of(v.index[t])) {
        sq[static_cast<std::size_t>(ball.level_of(*idx))] += w2;
      } else {
        outside += w2;
      }
    }
    for (double s : sq) {
      loc.sphere_mass.push_back(std::sqrt(s));
    }
    loc.outside_mass = std::sqrt(outside);
    loc.root_mass = loc.sphere_mass[0];
    loc.sphere_ratio = loc.sphere_mass[1] > 0.0 ? loc.sphere_mass[2] / loc.sphere_mass[1] : kNaN;
    loc.predicted_ratio = loc.alpha > 0 ? std::sqrt(d / static_cast<double>(loc.alpha)) : kNaN;
    out.localization.push_back(std::move(loc));
  }

  if (ev.size() >= 3) {
    const double gap = 10.0 * cfg.lanczos_tol;
    out.top3_separated = ev[0] - ev[1] > gap && ev[1] - ev[2] > gap;
    out.top3_lex = true;
    for (int i = 0; i < 3; ++i) {
      out.top3_lex = out.top3_lex && out.matches[i].matched && out.matches[i].lex_agreement;
    }
  }

  if (cfg.run_prune && have_regimes) {
    PruneSummary& ps = out.prune;
    ps.ran = true;
    ps.rough = part.rough.size();
    ps.residual_envelope = cfg.rough_constant * std::log(std::log(static_cast<double>(cfg.n_vertices)));
    try {
      const PrunedGraph pg = prune(g, part.rough, cfg.prune_c1, cfg.prune_c2);
      ps.ok = true;
      ps.removed = pg.removed_edges.size();
      ps.cycle_removals = pg.cycle_removals;
      ps.overlap_removals = pg.overlap_removals;
      ps.removed_max_degree = pg.removed_max_degree;
      for (const HatStats& h : pg.hat_stats) {
        ps.max_degree_loss = std::max(ps.max_degree_loss, g.degree(h.x) - h.alpha_hat);
      }
      ps.idempotent = prune(pg.pruned, part.rough, cfg.prune_c1, cfg.prune_c2).removed_edges.empty();
      std::vector<double> res;
      for (Vertex x : pg.rough) {
        try {
          res.push_back(rough_test_vector(pg, x, 1).residual);
        } catch (const ValidationError&) {
          ++ps.isolated;
        }
      }
      ps.residual_median = quantile(res, 0.5);
      ps.residual_p90 = quantile(res, 0.9);
      ps.residual_max = res.empty() ? kNaN : *std::max_element(res.begin(), res.end());
    } catch (const PrunePostconditionError& e) {
      ps.ok = false;
      ps.error = e.what();
    }
  }

  if (cfg.run_pointprocess) {
    PointProcessSummary& pp = out.pp;
    pp.ran = true;
    const IntensityRho rho = build_rho(cfg.n_vertices, d, out.u_star);
    pp.k_level = kappa_level(cfg.n_vertices);
    pp.kappa = kappa(rho, pp.k_level);
    pp.phi = empirical_phi(ev, d, out.u_star, pp.kappa).points;
    pp.spectrum_covers_cut = pp.phi.size() < ev.size();
    for (double p : sample_psi(rho, cfg.base_seed, replicate).points) {
      if (p >= pp.kappa) {
        pp.psi.push_back(p);
      }
    }
    pp.lp = lp_distance(pp.phi, pp.psi);
  }
  return out;
}

EnsembleResult run_ensemble(const ExperimentConfig& cfg, const std::function<void(const SeedResult&)>& on_seed) {
  cfg.validate();
  EnsembleResult res;
  res.config = cfg;
  for (std::uint32_t s = 0; s < cfg.n_seeds; ++s) {
    res.seeds.push_back(run_seed(cfg, s));
    if (on_seed) {
      on_seed(res.seeds.back());
    }
  }
  return res;
}

namespace {

json omega_json(const OmegaReport& o) {
  return json{{"disjoint", o.disjoint},       {"trees", o.trees},
              {"sphere_growth", o.sphere_growth}, {"child_bound", o.child_bound},
              {"second_moment", o.second_moment}, {"all", o.all()},
              {"overlapping_roots", o.overlapping_roots}, {"non_tree_roots", o.non_tree_roots},
              {"child_violations", o.child_violations}, {"moment_violations", o.moment_violations},
              {"growth_violations_by_level", o.growth_violations_by_level}};
}

void write_regimes(const EnsembleResult& res, std::ostream& out) {
  out << "seed,n,d,u_star,max_degree,edges,n_fine,n_intermediate,n_rough,omega_disjoint,omega_trees,"
         "omega_growth,omega_child,omega_moment,omega_all,regimes_ok\n";
  for (const SeedResult& s : res.seeds) {
    out << s.replicate << ',' << res.config.n_vertices << ',' << fmt(res.config.expected_degree) << ','
        << s.u_star << ',' << s.max_degree << ',' << s.n_edges << ',' << s.n_fine << ',' << s.n_intermediate
        << ',' << s.n_rough;
    if (s.omega) {
      const OmegaReport& o = *s.omega;
      out << ',' << o.disjoint << ',' << o.trees << ',' << o.sphere_growth << ',' << o.child_bound << ','
          << o.second_moment << ',' << o.all();
    } else {
      out << ",,,,,,";
    }
    out << ',' << s.regime_error.empty() << '\n';
  }
}

void write_estimators(const EnsembleResult& res, std::ostream& out) {
  out << "seed,vertex,alpha,beta,beta2,beta11,is_tree,lambda_cf,truncation_residual";
  for (EstimatorKind k : kKinds) {
    out << ',' << to_string(k);
  }
  for (EstimatorKind k : kKinds) {
    out << ",err_" << to_string(k);
  }
  out << '\n';
  for (const SeedResult& s : res.seeds) {
    for (const EstimatorRow& r : s.estimators) {
      out << s.replicate << ',' << r.vertex << ',' << r.stats.alpha << ',' << r.stats.beta << ','
          << r.stats.beta2 << ',';
      if (r.stats.beta11) {
        out << *r.stats.beta11;
      }
      out << ',' << r.is_tree << ',' << fmt(r.lambda_cf) << ',' << fmt(r.truncation_residual);
      for (const auto& e : r.estimates) {
        out << ',' << fmt(e.value);
      }
      for (const auto& e : r.estimates) {
        out << ',' << fmt(std::abs(e.value - r.lambda_cf));
      }
      out << '\n';
    }
  }
}

void write_localization(const EnsembleResult& res, std::ostream& out) {
  const int rr = std::max(res.config.loc_radius, 2);
  out << "seed,rank,lambda,vertex,alpha,root_mass";
  for (int i = 1; i <= rr; ++i) {
    out << ",s" << i << "_mass";
  }
  out << ",outside_mass,sphere_ratio,predicted_ratio,ball_is_tree\n";
  for (const SeedResult& s : res.seeds) {
    for (const LocalizationRow& l : s.localization) {
      out << s.replicate << ',' << l.rank << ',' << fmt(l.lambda) << ',' << l.vertex << ',' << l.alpha << ','
          << fmt(l.root_mass);
      for (int i = 1; i <= rr; ++i) {
        out << ',' << fmt(l.sphere_mass[static_cast<std::size_t>(i)]);
      }
      out << ',' << fmt(l.outside_mass) << ',' << fmt(l.sphere_ratio) << ',' << fmt(l.predicted_ratio) << ','
          << l.ball_is_tree << '\n';
    }
  }
}

json spectral_json(const EnsembleResult& res) {
  json seeds = json::array();
  for (const SeedResult& s : res.seeds) {
    json matches = json::array();
    for (std::size_t i = 0; i < s.matches.size(); ++i) {
      const EigenVertexMatch& m = s.matches[i];
      const MatchedStats& ms = s.matched[i];
      matches.push_back({{"rank", m.rank},
                         {"lambda", m.lambda},
                         {"vertex", m.vertex},
                         {"fine", m.matched},
                         {"overlap", num(m.overlap)},
                         {"lex_rank", m.lex_rank},
                         {"lex_agreement", m.lex_agreement},
                         {"unresolved", m.unresolved},
                         {"alpha", ms.stats.alpha},
                         {"beta", ms.stats.beta},
                         {"simplified_error", num(ms.simplified_error)},
                         {"sq_error_alpha", num(ms.sq_error_alpha)},
                         {"sq_error_two_term", num(ms.sq_error_two_term)},
                         {"sq_error_four_term", num(ms.sq_error_four_term)}});
    }
    std::vector<bool> conv(s.spectrum.converged.begin(), s.spectrum.converged.end());
    seeds.push_back({{"seed", s.replicate},
                     {"eigenvalues", s.spectrum.eigenvalues},
                     {"residuals", s.spectrum.residuals},
                     {"converged", conv},
                     {"matvecs", s.spectrum.matvec_count},
                     {"top3_separated", s.top3_separated},
                     {"top3_lex", s.top3_lex},
                     {"regime_error", s.regime_error.empty() ? json(nullptr) : json(s.regime_error)},
                     {"matches", matches}});
  }
  return json{{"tol", res.config.lanczos_tol}, {"seeds", seeds}};
}

json pointprocess_json(const EnsembleResult& res) {
  const ExperimentConfig& cfg = res.config;
  const int u = res.seeds.empty() ? degree_benchmark(cfg.n_vertices, cfg.expected_degree).u_star
                                  : res.seeds.front().u_star;
  const IntensityRho rho = build_rho(cfg.n_vertices, cfg.expected_degree, u);
  json seeds = json::array();
  std::vector<double> lps;
  for (const SeedResult& s : res.seeds) {
    if (!s.pp.ran) {
      continue;
    }
    lps.push_back(s.pp.lp);
    seeds.push_back({{"seed", s.replicate},
                     {"phi_points", s.pp.phi},
                     {"psi_points", s.pp.psi},
                     {"spectrum_covers_cut", s.pp.spectrum_covers_cut},
                     {"lp_distance", s.pp.lp}});
  }
  const double k_level = kappa_level(cfg.n_vertices);
  const double kap = kappa(rho, k_level);
  json window = nullptr;
  if (u >= 1 && cfg.expected_degree * u >= 1.0) {
    // The u-th degree sphere sizes: beta ~ Pois(d u) over the mu_u degree-u vertices.
    const auto zeta = static_cast<std::int64_t>(
        std::max(2.0, std::round(static_cast<double>(cfg.n_vertices) * pois_pmf(cfg.expected_degree, u))));
    const Interval w = order_stat_window(cfg.expected_degree, u, zeta, 1);
    window = {{"a", u}, {"zeta", zeta}, {"k", 1}, {"lo", w.lo}, {"hi", w.hi}};
  }
  json spacing = json::array();
  if (cfg.n_vertices >= 16 && u > cfg.expected_degree) {
    for (int k = 1; k <= 3; ++k) {
      const Spacing sp = predicted_spacing(cfg.expected_degree, u, k, cfg.n_vertices);
      spacing.push_back({{"k", k}, {"beta_gap", sp.beta_gap}, {"lambda_gap", sp.lambda_gap}});
    }
  }
  return json{{"rho_metadata",
               {{"n_vertices", rho.n_vertices},
                {"d", rho.d},
                {"u_star", rho.u_star},
                {"ell_max", rho.ell_max},
                {"atoms", rho.atoms.size()},
                {"total_mass", rho.total_mass},
                {"mass_cutoff", rho.mass_cutoff}}},
              {"k_level", k_level},
              {"kappa", num(kap)},
              {"seeds", seeds},
              {"lp_distance_median", num(median(lps))},
              {"window", window},
              {"spacing", spacing}};
}

}  // namespace

json summarize(const EnsembleResult& res) {
  const ExperimentConfig& cfg = res.config;
  std::vector<double> formula, sq_a, sq_two, sq_four, lp, root_dev, ratio_dev;
  std::size_t omega_pass = 0;
  std::size_t qualifying = 0;
  std::size_t qualifying_lex = 0;
  std::size_t separated = 0;
  std::size_t separated_lex = 0;
  std::size_t root_in = 0;
  std::size_t ratio_in = 0;
  std::size_t prune_ok = 0;
  std::size_t prune_ran = 0;
  for (const SeedResult& s : res.seeds) {
    double worst = 0.0;
    for (std::size_t i = 0; i < std::min<std::size_t>(5, s.matched.size()); ++i) {
      worst = std::max(worst, s.matched[i].simplified_error);
      sq_a.push_back(s.matched[i].sq_error_alpha);
      sq_two.push_back(s.matched[i].sq_error_two_term);
      sq_four.push_back(s.matched[i].sq_error_four_term);
    }
    formula.push_back(worst);
    const bool omega_ok = s.omega && s.omega->all();
    omega_pass += omega_ok;
    separated += s.top3_separated;
    separated_lex += s.top3_separated && s.top3_lex;
    if (omega_ok && s.top3_separated) {
      ++qualifying;
      qualifying_lex += s.top3_lex;
    }
    if (!s.localization.empty()) {
      const LocalizationRow& l = s.localization.front();
      root_in += l.root_mass >= 0.5 && l.root_mass <= 0.85;
      ratio_in += l.sphere_ratio >= 0.5 * l.predicted_ratio && l.sphere_ratio <= 2.0 * l.predicted_ratio;
      root_dev.push_back(std::abs(l.root_mass - 1.0 / std::sqrt(2.0)));
      ratio_dev.push_back(std::abs(l.sphere_ratio - l.predicted_ratio));
    }
    if (s.prune.ran) {
      ++prune_ran;
      prune_ok += s.prune.ok && s.prune.idempotent &&
                  s.prune.removed_max_degree <= static_cast<std::uint32_t>(cfg.prune_c1 + cfg.prune_c2 - 2);
    }
    if (s.pp.ran) {
      lp.push_back(s.pp.lp);
    }
  }
  const double n = static_cast<double>(res.seeds.size());
  return json{
      {"version", version_string()},
      {"config", cfg.to_json()},
      {"constants", pinned_constants()},
      {"degree_range_warning", cfg.degree_range_warning() ? json(*cfg.degree_range_warning()) : json(nullptr)},
      {"seeds", res.seeds.size()},
      {"u_star", res.seeds.empty() ? 0 : res.seeds.front().u_star},
      {"median_top5_formula_error", num(median(formula))},
      {"median_sq_error_alpha", num(median(sq_a))},
      {"median_sq_error_two_term", num(median(sq_two))},
      {"median_sq_error_four_term", num(median(sq_four))},
      {"omega_pass_seeds", omega_pass},
      {"lex_qualifying_seeds", qualifying},
      {"lex_qualifying_agree", qualifying_lex},
      {"top3_separated_seeds", separated},
      {"top3_separated_lex_agree", separated_lex},
      {"root_mass_in_range_fraction", num(root_in / n)},
      {"sphere_ratio_within_2x_fraction", num(ratio_in / n)},
      {"median_root_mass_deviation", num(median(root_dev))},
      {"median_sphere_ratio_deviation", num(median(ratio_dev))},
      {"prune_seeds", prune_ran},
      {"prune_ok_seeds", prune_ok},
      {"median_lp_distance", num(median(lp))}};
}

void write_reports(const EnsembleResult& res, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name);
    if (!f) {
      throw std::runtime_error("cannot write " + (dir / name).string());
    }
    return f;
  };
  const json header{{"version", version_string()},
                    {"config", res.config.to_json()},
                    {"constants", pinned_constants()}};
  {
    auto f = open("regimes.csv");
    write_regimes(res, f);
  }
  {
    auto f = open("estimators.csv");
    write_estimators(res, f);
  }
  {
    auto f = open("localization.csv");
    write_localization(res, f);
  }
  {
    json j = header;
    j["spectral"] = spectral_json(res);
    json omega = json::array();
    for (const SeedResult& s : res.seeds) {
      omega.push_back(s.omega ? omega_json(*s.omega) : json(nullptr));
    }
    j["omega"] = omega;
    auto f = open("spectral.json");
    f << j.dump(1) << '\n';
  }
  {
    json j = header;
    j["pointprocess"] = pointprocess_json(res);
    json prune = json::array();
    for (const SeedResult& s : res.seeds) {
      const PruneSummary& p = s.prune;
      if (!p.ran) {
        continue;
      }
      prune.push_back({{"seed", s.replicate},
                       {"ok", p.ok},
                       {"error", p.error},
                       {"rough", p.rough},
                       {"removed", p.removed},
                       {"cycle_removals", p.cycle_removals},
                       {"overlap_removals", p.overlap_removals},
                       {"removed_max_degree", p.removed_max_degree},
                       {"max_degree_loss", p.max_degree_loss},
                       {"idempotent", p.idempotent},
                       {"isolated", p.isolated},
                       {"residual_median", num(p.residual_median)},
                       {"residual_p90", num(p.residual_p90)},
                       {"residual_max", num(p.residual_max)},
                       {"residual_envelope", p.residual_envelope}});
    }
    json pj = header;
    pj["prune"] = prune;
    auto pf = open("prune.json");
    pf << pj.dump(1) << '\n';
    auto f = open("pointprocess.json");
    f << j.dump(1) << '\n';
  }
  {
    auto f = open("summary.json");
    f << summarize(res).dump(1) << '\n';
  }
}

}  // namespace sedge
