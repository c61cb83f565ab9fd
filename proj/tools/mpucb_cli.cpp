#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mpucb/experiment.hpp"

namespace {

std::filesystem::path output_dir(const mpucb::ExperimentConfig& cfg) {
  if (const char* env = std::getenv("MPUCB_OUTPUT_DIR"); env && *env) return env;
  return cfg.output;
}

int emit(const mpucb::ExperimentResult& result, const mpucb::ExperimentConfig& cfg) {
  const auto dir = output_dir(cfg);
  mpucb::write_outputs(result, dir);
  std::cout << "wrote " << result.curves.size() << " curves and summary.csv to " << dir.string()
            << '\n';
  for (const auto& c : result.curves) {
    std::cout << mpucb::to_string(c.point.policy) << " gamma=" << c.point.gamma.label()
              << " alpha=" << c.point.alpha << " final regret " << c.final_mean() << " +- "
              << c.final_std() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative heavy-tailed bandits on communication graphs"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Compare policies at one gamma and alpha");
  run->add_option("config", config_path, "JSON experiment config")->required()->check(CLI::ExistingFile);
  auto* sweep_gamma = app.add_subcommand("sweep-gamma", "Final regret over a gamma sweep");
  sweep_gamma->add_option("config", config_path, "JSON experiment config")->required()->check(CLI::ExistingFile);
  auto* sweep_alpha = app.add_subcommand("sweep-alpha", "Final regret over an alpha sweep");
  sweep_alpha->add_option("config", config_path, "JSON experiment config")->required()->check(CLI::ExistingFile);

  std::string edge_path;
  int subgraph = 0;
  std::uint64_t seed = 1;
  auto* info = app.add_subcommand("graph-info", "Describe an edge-list graph");
  info->add_option("edgelist", edge_path, "Edge list file")->required()->check(CLI::ExistingFile);
  info->add_option("--subgraph", subgraph, "Sample a connected subgraph of this size");
  info->add_option("--seed", seed, "Seed for subgraph sampling");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*info) {
      mpucb::Graph g = mpucb::load_edge_list_file(edge_path);
      if (subgraph > 0) {
        mpucb::Rng rng(seed);
        g = mpucb::sample_connected_subgraph(g, subgraph, rng);
      }
      std::cout << mpucb::graph_info(g);
      return 0;
    }
    const auto cfg = mpucb::load_config(config_path);
    if (*run) return emit(mpucb::run_experiment(cfg), cfg);
    if (*sweep_gamma) return emit(mpucb::ablation_gamma(cfg), cfg);
    if (*sweep_alpha) return emit(mpucb::ablation_alpha(cfg), cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
