#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "wg/cli.hpp"

using namespace wg;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

const char* kSmallConfig = R"(
[problem]
name = smooth_square
[mesh]
generator = square
n = 4
cell_kind = quad
[space]
k = 1
[output]
dir = /tmp/wgnet_cli_out
)";

}  // namespace

TEST_CASE("config: defaults and overrides") {
  auto cfg = RunConfig::parse_text(kSmallConfig);
  CHECK(cfg.problem_name == "smooth_square");
  CHECK(cfg.n == 4);
  CHECK(cfg.k == 1);
  CHECK(cfg.enrichment.training.steps == 2000);
  CHECK(cfg.enrichment.training.restarts == 4);
  CHECK(cfg.enrichment.training.hidden == std::vector<int>{32, 32});
  CHECK(cfg.enrichment.mode == LiftMode::generalized);
  CHECK(cfg.neural_quad.degree == 10);
  CHECK(cfg.neural_quad.subdivisions == 2);
  CHECK(cfg.solver.rel_tol == 1e-10);

  auto cfg2 = RunConfig::parse_text(
      "[training]\nwidths = 8,4\nsteps = 17\nseed = 99\n[enrichment]\nmode = projected\n");
  CHECK(cfg2.enrichment.training.hidden == std::vector<int>{8, 4});
  CHECK(cfg2.enrichment.training.steps == 17);
  CHECK(cfg2.enrichment.training.seed == 99);
  CHECK(cfg2.enrichment.mode == LiftMode::projected);
}

TEST_CASE("config: unknown keys and bad values are rejected by name") {
  CHECK_THROWS_WITH_AS(RunConfig::parse_text("[solver]\ntollerance = 1e-8\n"),
                       doctest::Contains("tollerance"), ConfigError);
  CHECK_THROWS_WITH_AS(RunConfig::parse_text("[slover]\nrel_tol = 1e-8\n"),
                       doctest::Contains("unknown section"), ConfigError);
  CHECK_THROWS_WITH_AS(RunConfig::parse_text("rel_tol = 1e-8\n"),
                       doctest::Contains("outside any section"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse_text("[space]\nk = 3\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse_text("[mesh]\nn = zero\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse_text("[mesh]\ngenerator = file\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse_text("[training]\nwidths = 8,-1\n"), ConfigError);
}

TEST_CASE("cmd_solve writes solution.csv and a manifest with the config echo") {
  auto cfg = RunConfig::parse_text(kSmallConfig);
  std::filesystem::remove_all(cfg.out_dir);
  auto res = cmd_solve(cfg, cfg.out_dir);
  CHECK(res.printed.find("errors:") != std::string::npos);

  auto csv = slurp(cfg.out_dir + "/solution.csv");
  CHECK(count_lines(csv) == 1 + 16);  // header + one row per cell

  auto manifest = json::parse(slurp(cfg.out_dir + "/manifest.json"));
  CHECK(manifest["command"] == "solve");
  CHECK(manifest["config_text"].get<std::string>() == cfg.raw_text);
  CHECK(manifest["config"]["mesh"]["n"] == 4);
  CHECK(manifest["results"]["dofs"] == 16 * 3 + 40 * 2);
  CHECK(manifest["results"].contains("err_aw"));
  std::filesystem::remove_all(cfg.out_dir);
}

TEST_CASE("cmd_convergence: row and EOC counts") {
  auto cfg = RunConfig::parse_text("[mesh]\nn = 4\n[convergence]\nlevels = 3\n"
                                   "[output]\ndir = /tmp/wgnet_cli_conv\n");
  std::filesystem::remove_all(cfg.out_dir);
  auto res = cmd_convergence(cfg, cfg.out_dir);
  auto csv = slurp(cfg.out_dir + "/rates.csv");
  CHECK(count_lines(csv) == 1 + 3);  // header + one row per level
  int eoc_count = 0;
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    auto last_comma = line.rfind(',');
    if (last_comma + 1 < line.size()) ++eoc_count;
  }
  CHECK(eoc_count == 2);  // EOC defined from the second level on
  CHECK(count_lines(slurp(cfg.out_dir + "/rates.gp.dat")) == 1 + 3);
  std::filesystem::remove_all(cfg.out_dir);
}

TEST_CASE("cmd_enrich: csv, manifest checkpoints, bit-stable reproduction") {
  const char* text = R"(
[problem]
name = smooth_square
[mesh]
n = 2
[space]
k = 1
[enrichment]
mode = generalized
max_m = 1
tol_rel = 0
[training]
widths = 4
restarts = 2
steps = 30
seed = 5
[quadrature]
neural_degree = 6
neural_subdivisions = 1
[output]
dir = /tmp/wgnet_cli_enrich
)";
  auto cfg = RunConfig::parse_text(text);
  std::filesystem::remove_all(cfg.out_dir);
  auto res1 = cmd_enrich(cfg, cfg.out_dir);
  auto manifest1 = slurp(cfg.out_dir + "/manifest.json");
  auto csv = slurp(cfg.out_dir + "/enrichment.csv");
  CHECK(count_lines(csv) == 1 + 2);  // header + baseline + one step

  auto j1 = json::parse(manifest1);
  REQUIRE(j1["networks"].size() == 1u);
  auto net = mlp_from_checkpoint(j1["networks"][0]);
  CHECK(net.widths == std::vector<int>{2, 4, 1});

  // identical config -> bit-identical run (theta serialized exactly)
  std::filesystem::remove_all(cfg.out_dir);
  auto res2 = cmd_enrich(cfg, cfg.out_dir);
  auto j2 = json::parse(slurp(cfg.out_dir + "/manifest.json"));
  CHECK(j1["networks"] == j2["networks"]);
  CHECK(j1["results"]["steps"].at(1)["eta"] == j2["results"]["steps"].at(1)["eta"]);
  std::filesystem::remove_all(cfg.out_dir);
}

TEST_CASE("checkpoint: theta round-trips bit-exactly through JSON text") {
  Mlp net = mlp_init({5, 3}, 77);
  for (auto& t : net.theta) t *= 1.0 + 1e-16;  // keep awkward doubles
  auto text = mlp_checkpoint(net).dump();
  auto back = mlp_from_checkpoint(json::parse(text));
  REQUIRE(back.theta.size() == net.theta.size());
  for (std::size_t i = 0; i < net.theta.size(); ++i) {
    CHECK(std::memcmp(&back.theta[i], &net.theta[i], sizeof(double)) == 0);
  }
}

TEST_CASE("cmd_mesh_info and cmd_validate_quadrature") {
  auto cfg = RunConfig::parse_text("[problem]\nname = lshape_singular\n[mesh]\n"
                                   "generator = lshape\nn = 2\n");
  auto info = cmd_mesh_info(cfg);
  CHECK(info.printed.find("12 cells") != std::string::npos);
  CHECK(info.printed.find("total area = 3") != std::string::npos);

  auto vq = cmd_validate_quadrature(RunConfig::parse_text("[quadrature]\npoly_degree = 6\n"));
  std::istringstream lines(vq.printed);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "shape,degree,a,b,computed,exact,rel_err");
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    auto pos = line.rfind(',');
    double rel = std::stod(line.substr(pos + 1));
    CHECK(rel <= 1e-12);
  }
  CHECK(rows == 2 * 28);  // both shapes, all monomials with a+b <= 6
}

#ifdef WGNET_BIN
TEST_CASE("wgnet binary: exit codes 0 and 2") {
  std::string dir = "/tmp/wgnet_cli_bin";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir + "/ok.cfg");
    out << kSmallConfig << "[output]\ndir = " << dir << "/out\n";
  }
  {
    std::ofstream out(dir + "/bad.cfg");
    out << "[solver]\ntollerance = 1e-8\n";
  }
  std::string bin = WGNET_BIN;
  int ok = std::system((bin + " solve --config " + dir + "/ok.cfg > /dev/null 2>&1").c_str());
  CHECK(WEXITSTATUS(ok) == 0);
  int bad = std::system((bin + " solve --config " + dir + "/bad.cfg > /dev/null 2>&1").c_str());
  CHECK(WEXITSTATUS(bad) == 2);
  int missing = std::system((bin + " solve --config /nonexistent.cfg > /dev/null 2>&1").c_str());
  CHECK(WEXITSTATUS(missing) == 2);
  std::filesystem::remove_all(dir);
}
#endif
