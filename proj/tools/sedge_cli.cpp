// sedge: command-line front end for the spectral-edge toolkit.
//
// Exit codes: 0 success, 1 I/O or unexpected error, 2 validation error,
// 3 postcondition failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sedge/errors.hpp"
#include "sedge/experiment.hpp"
#include "sedge/graph.hpp"
#include "sedge/graph_io.hpp"
#include "sedge/local.hpp"
#include "sedge/pointproc.hpp"
#include "sedge/probdist.hpp"
#include "sedge/prune.hpp"
#include "sedge/sparse_eigen.hpp"
#include "sedge/tree_eig.hpp"

using nlohmann::json;
using namespace sedge;

namespace {

void emit(const json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(1) << '\n';
    return;
  }
  std::ofstream f(path);
  if (!f) {
    throw std::runtime_error("cannot write " + path);
  }
  f << j.dump(1) << '\n';
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) {
    throw std::runtime_error("cannot write " + path);
  }
  return f;
}

double mean_degree(const SparseGraph& g) {
  return 2.0 * static_cast<double>(g.edge_count()) / static_cast<double>(g.n_vertices());
}

json stats_json(const LocalStats& s) {
  json j{{"alpha", s.alpha}, {"beta", s.beta}, {"beta2", s.beta2}, {"sphere_sizes", s.sphere_sizes},
         {"is_tree", s.is_tree}};
  j["beta11"] = s.beta11 ? json(*s.beta11) : json(nullptr);
  return j;
}

json spectrum_json(const SpectralResult& r, bool vectors) {
  json j{{"eigenvalues", r.eigenvalues},
         {"residuals", r.residuals},
         {"converged", std::vector<bool>(r.converged.begin(), r.converged.end())},
         {"unresolved_cluster", std::vector<bool>(r.unresolved_cluster.begin(), r.unresolved_cluster.end())},
         {"matvecs", r.matvec_count},
         {"tol", r.tol}};
  if (vectors) {
    json vs = json::array();
    for (const SparseVector& v : r.eigenvectors) {
      vs.push_back({{"index", v.index}, {"value", v.value}});
    }
    j["eigenvectors"] = vs;
  }
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral edge of sparse Erdos-Renyi graphs"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Sample G(N, d/N) and save it (.txt/.edges: text, else binary)");
  std::uint64_t gen_n = 0;
  double gen_d = 1.0;
  std::uint64_t gen_seed = 1;
  std::uint32_t gen_rep = 0;
  std::string gen_out;
  gen->add_option("-n,--n", gen_n, "Number of vertices")->required();
  gen->add_option("-d,--d", gen_d, "Expected degree");
  gen->add_option("--seed", gen_seed, "Base seed");
  gen->add_option("--replicate", gen_rep, "Replicate index (RNG stream)");
  gen->add_option("-o,--out", gen_out, "Output graph file")->required();

  // stats
  auto* st = app.add_subcommand("stats", "Local statistics and regime partition of a saved graph");
  std::string st_graph;
  int st_radius = 3;
  std::string st_regime = "rough";
  std::optional<double> st_d;
  std::string st_out;
  st->add_option("-g,--graph", st_graph, "Graph file")->required();
  st->add_option("-r,--radius", st_radius, "Ball radius");
  st->add_option("--regime", st_regime, "Rows for: fine, intermediate, rough or all")
      ->check(CLI::IsMember({"fine", "intermediate", "rough", "all"}));
  st->add_option("-d,--d", st_d, "Expected degree (default: empirical mean degree)");
  st->add_option("-o,--out", st_out, "CSV output (vertex,alpha,beta,...)")->required();

  // ball-eig
  auto* be = app.add_subcommand("ball-eig", "Top eigenpair of one vertex's ball and the closed-form estimates");
  std::string be_graph;
  Vertex be_vertex = 0;
  int be_radius = 5;
  std::optional<double> be_d;
  std::string be_out;
  bool be_vector = false;
  be->add_option("-g,--graph", be_graph, "Graph file")->required();
  be->add_option("-v,--vertex", be_vertex, "Root vertex")->required();
  be->add_option("-r,--radius", be_radius, "Ball radius");
  be->add_option("-d,--d", be_d, "Expected degree (default: empirical mean degree)");
  be->add_flag("--vector", be_vector, "Include the ball eigenvector");
  be->add_option("-o,--out", be_out, "JSON output (default stdout)");

  // spectrum
  auto* sp = app.add_subcommand("spectrum", "Extreme eigenpairs of the adjacency matrix");
  std::string sp_graph;
  int sp_k = 10;
  double sp_tol = 1e-10;
  std::uint64_t sp_seed = 1;
  bool sp_bottom = false;
  bool sp_vectors = false;
  std::string sp_out;
  sp->add_option("-g,--graph", sp_graph, "Graph file")->required();
  sp->add_option("-k,--k", sp_k, "Number of eigenpairs");
  sp->add_option("--tol", sp_tol, "Relative residual tolerance");
  sp->add_option("--seed", sp_seed, "Seed for Lanczos start vectors");
  sp->add_flag("--bottom", sp_bottom, "Most negative eigenvalues instead of largest");
  sp->add_flag("--vectors", sp_vectors, "Include sparse eigenvectors");
  sp->add_option("-o,--out", sp_out, "JSON output (default stdout)");

  // prune
  auto* pr = app.add_subcommand("prune", "Prune edges around rough-regime vertices");
  std::string pr_graph;
  std::optional<double> pr_d;
  int pr_c1 = 2;
  int pr_c2 = 5;
  std::string pr_removed;
  std::string pr_out;
  pr->add_option("-g,--graph", pr_graph, "Graph file")->required();
  pr->add_option("-d,--d", pr_d, "Expected degree (default: empirical mean degree)");
  pr->add_option("--c1", pr_c1, "Pruning constant c1 (>= 2)");
  pr->add_option("--c2", pr_c2, "Pruning constant c2 (>= 5)");
  pr->add_option("--removed", pr_removed, "Write removed edges as a text edge list");
  pr->add_option("-o,--out", pr_out, "JSON summary (default stdout)");

  // bounds
  auto* bd = app.add_subcommand("bounds", "Tabulate tail bounds against exact values");
  std::string bd_kind = "poisson";
  std::string bd_out;
  bd->add_option("--kind", bd_kind, "poisson (sharp tail) or binomial (Poisson comparison)")
      ->check(CLI::IsMember({"poisson", "binomial"}));
  bd->add_option("-o,--out", bd_out, "CSV output")->required();

  // pointprocess
  auto* pp = app.add_subcommand("pointprocess", "Intensity measure, kappa cut, Psi sample and LP distance");
  std::uint64_t pp_n = 0;
  double pp_d = 1.0;
  std::optional<int> pp_u;
  std::uint64_t pp_seed = 1;
  std::uint32_t pp_rep = 0;
  std::string pp_spectrum;
  std::string pp_out;
  pp->add_option("-n,--n", pp_n, "Number of vertices")->required();
  pp->add_option("-d,--d", pp_d, "Expected degree");
  pp->add_option("--u", pp_u, "Override u*");
  pp->add_option("--seed", pp_seed, "Seed for the Psi sample");
  pp->add_option("--replicate", pp_rep, "Replicate index");
  pp->add_option("--spectrum", pp_spectrum, "spectrum JSON; its eigenvalues give Phi");
  pp->add_option("-o,--out", pp_out, "JSON output (default stdout)");

  // report
  auto* rp = app.add_subcommand("report", "Run an ensemble and write all reports");
  std::string rp_config;
  std::vector<std::string> rp_set;
  std::optional<std::uint64_t> rp_n;
  std::optional<double> rp_d;
  std::optional<std::uint32_t> rp_seeds;
  std::optional<std::uint64_t> rp_base;
  std::optional<std::string> rp_outdir;
  rp->add_option("-c,--config", rp_config, "Flat key = value config file");
  rp->add_option("--set", rp_set, "Override a config key: key=value (repeatable)");
  rp->add_option("-n,--n", rp_n, "n_vertices");
  rp->add_option("-d,--d", rp_d, "expected_degree");
  rp->add_option("--seeds", rp_seeds, "n_seeds");
  rp->add_option("--base-seed", rp_base, "base_seed");
  rp->add_option("-o,--out", rp_outdir, "output_dir");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      GraphConfig cfg{gen_n, gen_d, gen_seed, gen_rep};
      cfg.validate();
      save_graph(sample_er(cfg), gen_out);
    } else if (*st) {
      const SparseGraph g = load_graph(st_graph);
      const double d = st_d.value_or(mean_degree(g));
      const int u = degree_benchmark(g.n_vertices(), d).u_star;
      const RegimePartition part = classify_regimes(g, u);
      std::vector<Vertex> roots;
      if (st_regime == "fine") {
        roots = part.fine;
      } else if (st_regime == "intermediate") {
        roots = part.intermediate;
      } else if (st_regime == "rough") {
        roots = part.rough;
      } else {
        for (Vertex v = 0; v < g.n_vertices(); ++v) {
          roots.push_back(v);
        }
      }
      std::vector<std::pair<Vertex, LocalStats>> rows;
      for (Vertex v : roots) {
        rows.emplace_back(v, local_stats(extract_ball(g, v, st_radius)));
      }
      auto f = open_out(st_out);
      write_local_stats_csv(f, rows, st_radius);
      emit({{"n_vertices", g.n_vertices()},
            {"edges", g.edge_count()},
            {"d", d},
            {"u_star", u},
            {"max_degree", g.max_degree()},
            {"thresholds", {part.m_fine, part.m_intermediate, part.m_rough}},
            {"fine", part.fine.size()},
            {"intermediate", part.intermediate.size()},
            {"rough", part.rough.size()}},
           "");
    } else if (*be) {
      const SparseGraph g = load_graph(be_graph);
      if (be_vertex >= g.n_vertices()) {
        throw ValidationError("vertex out of range");
      }
      const double d = be_d.value_or(mean_degree(g));
      const RootedBall ball = extract_ball(g, be_vertex, be_radius);
      const LocalStats stats = local_stats(ball);
      json j{{"vertex", be_vertex}, {"radius", be_radius}, {"d", d}, {"stats", stats_json(stats)}};
      json est = json::object();
      for (EstimatorKind k : {EstimatorKind::kStar, EstimatorKind::kTwoTerm, EstimatorKind::kFourTerm,
                              EstimatorKind::kSimplified, EstimatorKind::kAdk}) {
        try {
          const EigenvalueEstimate e = estimate(stats, d, k);
          est[std::string(to_string(k))] = e.in_domain ? json(e.value) : json(nullptr);
        } catch (const ValidationError&) {
          est[std::string(to_string(k))] = nullptr;
        }
      }
      j["estimates"] = est;
      const BallEigenPair pair = cf_eigenvalue(ball);
      const DecayProfile dp = decay_profile(pair, ball, d);
      j["lambda"] = pair.lambda;
      j["residual"] = pair.residual;
      j["iterations"] = pair.iterations;
      j["truncation_residual"] = truncation_residual(g, ball, pair);
      j["level_mass"] = dp.level_mass;
      j["tail_mass"] = dp.tail_mass;
      if (be_vector) {
        j["vertices"] = ball.vertices;
        j["vector"] = pair.vector;
      }
      emit(j, be_out);
    } else if (*sp) {
      const SparseGraph g = load_graph(sp_graph);
      LanczosOptions opt;
      opt.tol = sp_tol;
      opt.seed = sp_seed;
      const SpectralResult r = sp_bottom ? bottom_k(g, sp_k, opt) : top_k(g, sp_k, opt);
      json j = spectrum_json(r, sp_vectors);
      j["which"] = sp_bottom ? "bottom" : "top";
      emit(j, sp_out);
    } else if (*pr) {
      const SparseGraph g = load_graph(pr_graph);
      const double d = pr_d.value_or(mean_degree(g));
      const int u = degree_benchmark(g.n_vertices(), d).u_star;
      const RegimePartition part = classify_regimes(g, u);
      const PrunedGraph pg = prune(g, part.rough, pr_c1, pr_c2);
      if (!pr_removed.empty()) {
        auto f = open_out(pr_removed);
        f << "# vertices " << g.n_vertices() << '\n';
        for (const auto& [a, b] : pg.removed_edges) {
          f << a << ' ' << b << '\n';
        }
      }
      std::vector<double> res;
      std::size_t isolated = 0;
      for (Vertex x : pg.rough) {
        try {
          res.push_back(rough_test_vector(pg, x, 1).residual);
        } catch (const ValidationError&) {
          ++isolated;
        }
      }
      std::sort(res.begin(), res.end());
      emit({{"u_star", u},
            {"rough", pg.rough.size()},
            {"removed", pg.removed_edges.size()},
            {"cycle_removals", pg.cycle_removals},
            {"overlap_removals", pg.overlap_removals},
            {"removed_max_degree", pg.removed_max_degree},
            {"limit", pr_c1 + pr_c2 - 2},
            {"isolated", isolated},
            {"residual_median", res.empty() ? json(nullptr) : json(res[res.size() / 2])},
            {"residual_max", res.empty() ? json(nullptr) : json(res.back())}},
           pr_out);
    } else if (*bd) {
      auto f = open_out(bd_out);
      char buf[256];
      if (bd_kind == "poisson") {
        f << "lambda,delta,threshold,exact,upper,lower,exact_le_upper,exact_ge_lower\n";
        for (double lambda : {10.0, 30.0, 100.0, 300.0, 1000.0}) {
          for (std::int64_t t = static_cast<std::int64_t>(std::ceil(lambda + std::sqrt(lambda)));
               t <= static_cast<std::int64_t>(4.0 * lambda); t += std::max<std::int64_t>(1, static_cast<std::int64_t>(lambda / 10))) {
            const double delta = static_cast<double>(t) / lambda - 1.0;
            if (delta < 1.0 / std::sqrt(lambda)) {
              continue;
            }
            const TailBoundResult r = sharp_pois_tail_bounds(lambda, delta);
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d\n", lambda, delta, r.threshold,
                          r.exact.value_or(NAN), r.upper, r.lower.value_or(NAN),
                          r.exact ? *r.exact <= r.upper : 0, r.exact && r.lower ? *r.exact >= *r.lower : 0);
            f << buf;
          }
        }
      } else {
        f << "n,p,k,binom_pmf,pois_pmf,deviation,bound,within\n";
        for (std::int64_t n : {1000, 10000, 100000}) {
          const double half = std::sqrt(static_cast<double>(n)) / 2.0;
          for (double mean : {0.5, 1.0, 2.0, half}) {
            for (std::int64_t k = 0; static_cast<double>(k) <= half; ++k) {
              const double p = mean / static_cast<double>(n);
              const BinomPoisComparison c = binom_pois_compare(n, p, k);
              std::snprintf(buf, sizeof buf, "%lld,%.17g,%lld,%.17g,%.17g,%.17g,%.17g,%d\n",
                            static_cast<long long>(n), p, static_cast<long long>(k), c.binom_pmf, c.pois_pmf,
                            c.deviation, c.bound, c.deviation <= c.bound);
              f << buf;
            }
          }
        }
      }
    } else if (*pp) {
      const int u = pp_u.value_or(degree_benchmark(pp_n, pp_d).u_star);
      const IntensityRho rho = build_rho(pp_n, pp_d, u);
      const double k_level = kappa_level(pp_n);
      const double kap = kappa(rho, k_level);
      std::vector<double> psi;
      for (double p : sample_psi(rho, pp_seed, pp_rep).points) {
        if (p >= kap) {
          psi.push_back(p);
        }
      }
      json j{{"rho_metadata",
              {{"n_vertices", pp_n}, {"d", pp_d}, {"u_star", u}, {"ell_max", rho.ell_max},
               {"atoms", rho.atoms.size()}, {"total_mass", rho.total_mass}}},
             {"k_level", k_level},
             {"kappa", std::isfinite(kap) ? json(kap) : json(nullptr)},
             {"psi_points", psi}};
      if (!pp_spectrum.empty()) {
        std::ifstream in(pp_spectrum);
        if (!in) {
          throw std::runtime_error("cannot read " + pp_spectrum);
        }
        const json spec = json::parse(in);
        const auto ev = spec.at("eigenvalues").get<std::vector<double>>();
        const PointProcessSample phi = empirical_phi(ev, pp_d, u, kap);
        j["phi_points"] = phi.points;
        j["lp_distance"] = lp_distance(phi.points, psi);
      }
      emit(j, pp_out);
    } else if (*rp) {
      ExperimentConfig cfg;
      if (!rp_config.empty()) {
        for (const auto& [k, v] : read_config_file(rp_config)) {
          cfg.set(k, v);
        }
      }
      for (const std::string& kv : rp_set) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
          throw ValidationError("--set expects key=value, got '" + kv + "'");
        }
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
      }
      if (rp_n) cfg.n_vertices = *rp_n;
      if (rp_d) cfg.expected_degree = *rp_d;
      if (rp_seeds) cfg.n_seeds = *rp_seeds;
      if (rp_base) cfg.base_seed = *rp_base;
      if (rp_outdir) cfg.output_dir = *rp_outdir;
      cfg.validate();
      if (const auto w = cfg.degree_range_warning()) {
        std::cerr << "warning: " << *w << '\n';
      }
      // Reports are rewritten after every seed so an interrupted run keeps
      // what it finished.
      EnsembleResult res;
      res.config = cfg;
      for (std::uint32_t s = 0; s < cfg.n_seeds; ++s) {
        res.seeds.push_back(run_seed(cfg, s));
        write_reports(res, cfg.output_dir);
        std::cerr << "seed " << s + 1 << '/' << cfg.n_seeds << " done\n";
      }
    }
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const PostconditionError& e) {
    std::cerr << "postcondition failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
