#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sedge/errors.hpp"
#include "sedge/experiment.hpp"

using namespace sedge;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SEDGE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config validation") {
  ExperimentConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.radius = 3;
  cfg.loc_radius = 2;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg.radius = 4;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg.radius = 5;
  cfg.loc_radius = 3;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg.radius = 6;
  CHECK_NOTHROW(cfg.validate());
  cfg.top_k = 2;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg.top_k = 10;
  cfg.prune_c2 = 4;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("degree range warning") {
  ExperimentConfig cfg;
  CHECK_FALSE(cfg.degree_range_warning().has_value());
  cfg.expected_degree = 3.0;
  CHECK(cfg.degree_range_warning().has_value());
}

TEST_CASE("config keys and files") {
  ExperimentConfig cfg;
  cfg.set("n_vertices", "5000");
  cfg.set("expected_degree", "1.5");
  cfg.set("run_prune", "false");
  CHECK(cfg.n_vertices == 5000);
  CHECK(cfg.expected_degree == 1.5);
  CHECK_FALSE(cfg.run_prune);
  CHECK_THROWS_AS(cfg.set("no_such_key", "1"), ValidationError);
  CHECK_THROWS_AS(cfg.set("radius", "five"), ValidationError);
  CHECK_THROWS_AS(cfg.set("run_omega", "maybe"), ValidationError);

  TempDir dir("sedge_cfg_test");
  {
    std::ofstream f(dir.path / "a.cfg");
    f << "# ensemble\n n_vertices = 20000 \n\nn_seeds=3  # trailing comment\n";
  }
  const auto kv = read_config_file(dir.path / "a.cfg");
  CHECK(kv.size() == 2);
  CHECK(kv.at("n_vertices") == "20000");
  CHECK(kv.at("n_seeds") == "3");
  {
    std::ofstream f(dir.path / "b.cfg");
    f << "radius 5\n";
  }
  CHECK_THROWS_AS(read_config_file(dir.path / "b.cfg"), ValidationError);
  CHECK_THROWS_AS(read_config_file(dir.path / "missing.cfg"), ValidationError);

  const nlohmann::json j = cfg.to_json();
  CHECK(j.at("n_vertices") == 5000);
  CHECK(j.at("run_prune") == false);
}

TEST_CASE("a small ensemble is reproducible") {
  ExperimentConfig cfg;
  cfg.n_vertices = 10000;
  cfg.n_seeds = 2;
  cfg.base_seed = 3;
  TempDir a("sedge_rep_a");
  TempDir b("sedge_rep_b");
  const EnsembleResult ra = run_ensemble(cfg);
  const EnsembleResult rb = run_ensemble(cfg);
  write_reports(ra, a.path);
  write_reports(rb, b.path);
  for (const char* f : {"regimes.csv", "estimators.csv", "localization.csv"}) {
    CHECK(slurp(a.path / f) == slurp(b.path / f));
  }
  for (const char* f : {"spectral.json", "pointprocess.json", "prune.json", "summary.json"}) {
    auto ja = nlohmann::json::parse(slurp(a.path / f));
    auto jb = nlohmann::json::parse(slurp(b.path / f));
    CHECK(ja.contains("version"));
    CHECK(ja.contains("constants"));
    ja["config"].erase("output_dir");
    jb["config"].erase("output_dir");
    CHECK(ja == jb);
  }

  const SeedResult& s = ra.seeds[0];
  CHECK(s.u_star == 7);
  CHECK(s.regime_error.empty());
  CHECK(s.spectrum.eigenvalues.size() == 10);
  CHECK(s.n_fine <= s.n_intermediate);
  CHECK(s.n_intermediate <= s.n_rough);
  CHECK(s.prune.ran);
  CHECK(s.pp.ran);
  CHECK(ra.seeds[0].n_edges != ra.seeds[1].n_edges);
}

TEST_CASE("regime failure is recorded and the spectrum still runs") {
  ExperimentConfig cfg;
  cfg.n_vertices = 1000;
  const SeedResult s = run_seed(cfg, 0);
  CHECK(s.u_star == 6);
  CHECK_FALSE(s.regime_error.empty());
  CHECK_FALSE(s.omega.has_value());
  CHECK_FALSE(s.prune.ran);
  CHECK(s.spectrum.eigenvalues.size() == 10);
}

TEST_CASE("median") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK(std::isnan(median({})));
}

TEST_CASE("command line exit codes") {
  TempDir dir("sedge_cli_test");
  const std::string g = (dir.path / "g.bin").string();
  CHECK(run_cli("generate -n 1 -o " + g) == 2);
  CHECK(run_cli("stats -g " + (dir.path / "none.bin").string() + " -o " + (dir.path / "s.csv").string()) == 1);
  REQUIRE(run_cli("generate -n 20000 -d 1 --seed 4 -o " + g) == 0);
  CHECK(run_cli("stats -g " + g + " --regime fine -o " + (dir.path / "s.csv").string()) == 0);
  CHECK(fs::file_size(dir.path / "s.csv") > 0);
  CHECK(run_cli("spectrum -g " + g + " -k 5 -o " + (dir.path / "sp.json").string()) == 0);
  const auto sp = nlohmann::json::parse(slurp(dir.path / "sp.json"));
  CHECK(sp.at("eigenvalues").size() == 5);
  CHECK(run_cli("spectrum -g " + g + " -k 0") == 2);
  CHECK(run_cli("ball-eig -g " + g + " -v 20000") == 2);
  CHECK(run_cli("prune -g " + g + " -o " + (dir.path / "p.json").string()) == 0);
  CHECK(run_cli("pointprocess -n 20000 --spectrum " + (dir.path / "sp.json").string() + " -o " +
                (dir.path / "pp.json").string()) == 0);
  CHECK(run_cli("report -n 5000 --set radius=3 --set loc_radius=2 -o " + (dir.path / "r").string()) == 2);
  CHECK(run_cli("report -n 5000 --set top_k=5 -o " + (dir.path / "r").string()) == 0);
  CHECK(fs::exists(dir.path / "r" / "summary.json"));
}
