#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sedge/local.hpp"
#include "sedge/sparse_eigen.hpp"
#include "sedge/tree_eig.hpp"

namespace sedge {

std::string version_string();

/// Every knob of an ensemble run. Keys of the flat config file are the
/// field names below.
struct ExperimentConfig {
  std::uint64_t n_vertices = 1000000;
  double expected_degree = 1.0;
  std::uint32_t n_seeds = 1;
  std::uint64_t base_seed = 1;
  int radius = 5;                    // r, ball radius for the fine-regime analysis
  int loc_radius = 2;                // r', spheres reported in the localization table
  int top_k = 10;
  std::string output_dir = "out";
  double omega_constant = 4.0;       // envelope constant for the structural event
  double truncation_constant = 4.0;  // envelope constant for the truncation residual
  double rough_constant = 4.0;       // envelope constant for the rough test-vector residual
  int prune_c1 = 2;
  int prune_c2 = 5;
  double lanczos_tol = 1e-10;
  bool run_omega = true;
  bool run_prune = true;
  bool run_pointprocess = true;

  /// Throws ValidationError.
  void validate() const;
  /// Message when d is outside [log^{-1/9} N, log^{1/40} N].
  std::optional<std::string> degree_range_warning() const;
  /// Throws ValidationError on an unknown key or unparsable value.
  void set(const std::string& key, const std::string& value);
  nlohmann::json to_json() const;
};

/// Reads `key = value` lines; `#` starts a comment.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

/// Constants the reports depend on besides the config.
nlohmann::json pinned_constants();

struct EstimatorRow {
  Vertex vertex = 0;
  LocalStats stats;
  bool is_tree = false;
  double lambda_cf = 0.0;  // NaN when the ball is not a tree
  std::vector<EigenvalueEstimate> estimates;  // star, two_term, four_term, simplified, adk
  double truncation_residual = 0.0;
};

/// Local statistics of the heaviest vertex of one global eigenvector.
struct MatchedStats {
  int rank = 0;
  double lambda = 0.0;
  Vertex vertex = 0;
  LocalStats stats;
  double simplified_error = 0.0;   // |lambda - sqrt(a + b/a + (d^2+d)/a)|
  double sq_error_alpha = 0.0;     // |lambda^2 - a|
  double sq_error_two_term = 0.0;  // |lambda^2 - (a + b/a)|
  double sq_error_four_term = 0.0; // |lambda^2 - four_term^2|
};

struct LocalizationRow {
  int rank = 0;
  double lambda = 0.0;
  Vertex vertex = 0;
  std::uint64_t alpha = 0;
  double root_mass = 0.0;            // |v(x)|
  std::vector<double> sphere_mass;   // ||v|S_i||, i = 0..r'
  double outside_mass = 0.0;         // ||v outside B_{r'}||
  double sphere_ratio = 0.0;         // ||v|S_2|| / ||v|S_1||
  double predicted_ratio = 0.0;      // sqrt(d / a)
  bool ball_is_tree = false;
};

struct PruneSummary {
  bool ran = false;
  bool ok = false;
  std::string error;
  std::size_t rough = 0;
  std::size_t removed = 0;
  std::size_t cycle_removals = 0;
  std::size_t overlap_removals = 0;
  std::uint32_t removed_max_degree = 0;
  std::uint32_t max_degree_loss = 0;  // max over rough x of alpha - alpha_hat
  bool idempotent = false;
  std::size_t isolated = 0;
  double residual_median = 0.0;
  double residual_p90 = 0.0;
  double residual_max = 0.0;
  double residual_envelope = 0.0;
};

struct PointProcessSummary {
  bool ran = false;
  double k_level = 0.0;
  double kappa = 0.0;
  std::vector<double> phi;   // truncated at kappa, descending
  std::vector<double> psi;   // truncated at kappa, descending
  bool spectrum_covers_cut = true;  // false when all top_k values are above the cut
  double lp = 0.0;
};

struct SeedResult {
  std::uint32_t replicate = 0;
  int u_star = 0;
  std::uint32_t max_degree = 0;
  std::size_t n_edges = 0;
  std::size_t n_fine = 0;
  std::size_t n_intermediate = 0;
  std::size_t n_rough = 0;
  std::string regime_error;  // set when classify_regimes rejected u*
  std::optional<OmegaReport> omega;
  std::vector<EstimatorRow> estimators;
  SpectralResult spectrum;
  std::vector<EigenVertexMatch> matches;
  std::vector<MatchedStats> matched;
  std::vector<LocalizationRow> localization;
  bool top3_separated = false;  // top-3 gaps > 10 tol
  bool top3_lex = false;        // top-3 eigenvalue order equals (alpha, beta) lex order
  PruneSummary prune;
  PointProcessSummary pp;
};

SeedResult run_seed(const ExperimentConfig& cfg, std::uint32_t replicate);

struct EnsembleResult {
  ExperimentConfig config;
  std::vector<SeedResult> seeds;
};

/// Runs replicates 0..n_seeds-1. `on_seed` sees each result as it finishes.
EnsembleResult run_ensemble(const ExperimentConfig& cfg,
                            const std::function<void(const SeedResult&)>& on_seed = {});

/// regimes.csv, estimators.csv, localization.csv, spectral.json,
/// pointprocess.json, prune.json, summary.json.
void write_reports(const EnsembleResult& res, const std::filesystem::path& dir);

nlohmann::json summarize(const EnsembleResult& res);

double median(std::vector<double> v);

}  // namespace sedge
