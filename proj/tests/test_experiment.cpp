#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mpucb/experiment.hpp"

using namespace mpucb;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("mpucb_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("config parsing") {
  auto cfg = parse_config(R"({"graph": {"type": "ba", "agents": 20, "attach": 2},
                              "instance": {"type": "hard", "arms": 3, "gap": 0.2, "eps": 0.5},
                              "policies": ["kmp", "consensus"], "horizon": 100, "repetitions": 3,
                              "seed": 9, "gamma": [0, "diameter"], "estimator": "median-of-means",
                              "kappa": 0.3, "c": 2.0, "output": "x"})");
  CHECK(cfg.graph.type == "ba");
  CHECK(cfg.graph.attach == 2);
  CHECK(cfg.instance.eps == 0.5);
  CHECK(cfg.policies == std::vector<PolicyKind>{PolicyKind::Kmp, PolicyKind::Consensus});
  CHECK(cfg.gamma.size() == 2);
  CHECK(cfg.gamma[1].kind == GammaSpec::Kind::Diameter);
  CHECK(cfg.estimator == EstimatorKind::MedianOfMeans);
  CHECK(cfg.seed == 9);

  auto defaults = parse_config("{}");
  CHECK(defaults.graph.agents == 50);
  CHECK(defaults.graph.p == 0.7);
  CHECK(defaults.instance.arms == 5);
  CHECK(defaults.instance.alpha == 1.9);
  CHECK(defaults.horizon == 2000);
  CHECK(defaults.repetitions == 20);
  CHECK(defaults.policies.size() == 5);
  CHECK(defaults.gamma[0].kind == GammaSpec::Kind::HalfDiameter);

  CHECK_THROWS_AS(parse_config(R"({"policies": ["ucb"]})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"graph": {"type": "grid"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"instance": {"type": "cauchy"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"repetitions": 0})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"gamma": "quarter"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"horizon": "long"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"horizn": 5})"), ConfigError);
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
}

TEST_CASE("gamma resolution and labels") {
  CHECK(GammaSpec{}.resolve(5) == 2);
  CHECK((GammaSpec{GammaSpec::Kind::Diameter, 0}.resolve(5)) == 5);
  CHECK(GammaSpec::of(9).resolve(3) == 3);
  CHECK(GammaSpec::of(1).label() == "1");
  CHECK(curve_filename({PolicyKind::Kmp, GammaSpec{}, 1.9}) == "curve_kmp_ghalf_a1.9.csv");
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("single agent, horizon K: regret is the initialization cost") {
  ExperimentConfig cfg;
  cfg.graph = {"complete", 1};
  cfg.instance.type = "hard";
  cfg.instance.arms = 3;
  cfg.instance.gap = 0.1;
  cfg.horizon = 3;
  cfg.repetitions = 1;
  cfg.gamma = {GammaSpec::of(0)};
  auto res = run_experiment(cfg);
  REQUIRE(res.curves.size() == 5);
  for (const auto& c : res.curves) CHECK(c.final_mean() == doctest::Approx(0.2));
}

TEST_CASE("outputs are reproducible and well formed") {
  ExperimentConfig cfg;
  cfg.graph = {"er", 8, 0.5};
  cfg.instance.type = "hard";
  cfg.instance.arms = 2;
  cfg.instance.gap = 0.2;
  cfg.horizon = 200;
  cfg.repetitions = 3;
  cfg.threads = 2;
  auto a = scratch("a"), b = scratch("b");
  write_outputs(run_experiment(cfg), a);
  cfg.threads = 1;
  write_outputs(run_experiment(cfg), b);
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    ++files;
    CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));
  }
  CHECK(files == 6);

  std::ifstream curve(a / "curve_decentralized_ghalf_a1.9.csv");
  std::string line;
  std::getline(curve, line);
  CHECK(line == "round,mean_regret,std_regret");
  double prev = -1.0;
  int rows = 0;
  while (std::getline(curve, line)) {
    std::stringstream ss(line);
    std::string round, mean;
    std::getline(ss, round, ',');
    std::getline(ss, mean, ',');
    CHECK(std::stod(mean) >= prev);
    prev = std::stod(mean);
    ++rows;
  }
  CHECK(rows == 201);

  // Lower-bound column equals the reference value of the hard instance.
  const double lb = lower_bound_reference(make_hard_instance(2, 0.2, 1.0), 1.0, 200);
  std::ifstream summary(a / "summary.csv");
  std::getline(summary, line);
  int summary_rows = 0;
  while (std::getline(summary, line)) {
    ++summary_rows;
    CHECK(line.find(format_double(lb)) != std::string::npos);
  }
  CHECK(summary_rows == 5);
}

TEST_CASE("gamma sweep") {
  ExperimentConfig cfg;
  cfg.graph = {"path", 4};
  cfg.instance.type = "hard";
  cfg.instance.arms = 2;
  cfg.policies = {PolicyKind::Decentralized};
  cfg.horizon = 50;
  cfg.repetitions = 2;
  auto res = ablation_gamma(cfg);
  REQUIRE(res.curves.size() == 4);
  for (int g = 0; g < 4; ++g) CHECK(res.curves[g].point.gamma == GammaSpec::of(g));
  CHECK(res.curves[3].clique_blocks == 1.0);
  CHECK(res.curves[3].mwis_size == 1.0);
  CHECK(res.curves[0].clique_blocks == 4.0);

  cfg.gamma_sweep = {GammaSpec::of(1), GammaSpec::of(7)};
  auto clamped = ablation_gamma(cfg);
  REQUIRE(clamped.curves.size() == 2);
  CHECK(clamped.curves[1].gamma_effective == 3.0);
}

TEST_CASE("alpha sweep") {
  ExperimentConfig cfg;
  cfg.graph = {"complete", 3};
  cfg.horizon = 30;
  cfg.repetitions = 1;
  cfg.instance.arms = 3;
  auto res = ablation_alpha(cfg);
  CHECK(res.curves.size() == 25);
  for (PolicyKind p : all_policies()) {
    int rows = 0;
    for (const auto& c : res.curves) rows += c.point.policy == p;
    CHECK(rows == 5);
  }
  cfg.instance.type = "hard";
  CHECK_THROWS_AS(ablation_alpha(cfg), ConfigError);
}

TEST_CASE("graph info") {
  auto text = graph_info(Graph::path(4));
  CHECK(text.find("diameter: 3") != std::string::npos);
  CHECK(text.find("3,1,1") != std::string::npos);
  CHECK(graph_info(Graph(2)).find("connected: no") != std::string::npos);
}

TEST_CASE("edge-list graphs in experiments") {
  auto dir = scratch("edges");
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "g.txt");
    out << "# toy\n";
    for (int i = 0; i < 30; ++i) out << i << ' ' << (i + 1) % 30 << '\n';
  }
  GraphSpec spec;
  spec.type = "edgelist";
  spec.path = (dir / "g.txt").string();
  spec.subgraph = 10;
  Graph g = build_graph(spec, 4);
  CHECK(g.num_vertices() == 10);
  CHECK(g.is_connected());
  CHECK(build_graph(spec, 4) == g);
}
