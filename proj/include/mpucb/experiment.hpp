#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mpucb/graph.hpp"
#include "mpucb/policies.hpp"
#include "mpucb/rewards.hpp"
#include "mpucb/simulator.hpp"

namespace mpucb {

struct GraphSpec {
  std::string type = "er";  // er | ba | edgelist | complete | path | star
  int agents = 50;
  double p = 0.7;
  int attach = 5;
  std::string path;
  int subgraph = 0;  // edgelist only; 0 keeps the whole graph
};

struct InstanceSpec {
  std::string type = "stable";  // stable | hard | gaussian
  int arms = 5;
  double alpha = 1.9;
  double gap = 0.1;
  double eps = 1.0;
  double std = 1.0;
};

// A requested gamma. Numeric values above a graph's diameter are clamped.
struct GammaSpec {
  enum class Kind { Value, HalfDiameter, Diameter };
  Kind kind = Kind::HalfDiameter;
  int value = 0;

  static GammaSpec of(int g) { return {Kind::Value, g}; }
  int resolve(int diameter) const;
  std::string label() const;
  friend bool operator==(const GammaSpec&, const GammaSpec&) = default;
};

struct ExperimentConfig {
  GraphSpec graph;
  InstanceSpec instance;
  std::vector<PolicyKind> policies = all_policies();
  int horizon = 2000;
  int repetitions = 20;
  std::uint64_t seed = 1;
  std::vector<GammaSpec> gamma{GammaSpec{}};
  std::vector<GammaSpec> gamma_sweep;  // empty: 0 .. largest diameter
  std::vector<double> alpha_sweep{1.1, 1.3, 1.5, 1.7, 1.9};
  EstimatorKind estimator = EstimatorKind::OnlineTrimmed;
  double kappa = 0.5;
  double c = 1.0;
  std::string output = "results";
  int threads = 0;  // 0: hardware concurrency

  void validate() const;
};

ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Graph and instance of repetition r; both depend only on base_seed + r.
Graph build_graph(const GraphSpec& spec, std::uint64_t rep_seed);
BanditInstance build_instance(const InstanceSpec& spec, double alpha, std::uint64_t rep_seed);
std::uint64_t reward_seed(std::uint64_t rep_seed);

struct SweepPoint {
  PolicyKind policy = PolicyKind::Decentralized;
  GammaSpec gamma;
  double alpha = 1.9;
};

struct CurveResult {
  SweepPoint point;
  std::vector<double> mean;  // rounds 0..T
  std::vector<double> std;
  std::vector<double> final_per_rep;
  double lower_bound = 0.0;
  double gamma_effective = 0.0;
  double clique_blocks = 0.0;
  double mwis_size = 0.0;

  double final_mean() const { return mean.back(); }
  double final_std() const { return std.back(); }
};

struct ExperimentResult {
  int horizon = 0;
  std::vector<CurveResult> curves;  // sorted by (policy, gamma, alpha)
};

// Every (policy, gamma, alpha) combination over all repetitions.
ExperimentResult run_grid(const ExperimentConfig& config, const std::vector<GammaSpec>& gammas,
                          const std::vector<double>& alphas);

ExperimentResult run_experiment(const ExperimentConfig& config);
ExperimentResult ablation_gamma(const ExperimentConfig& config);
ExperimentResult ablation_alpha(const ExperimentConfig& config);

std::string curve_filename(const SweepPoint& point);
std::string format_double(double x);

// curve_<policy>_g<gamma>_a<alpha>.csv per point plus summary.csv.
void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir);

// Text report: size, diameter and per-gamma cover and leader counts.
std::string graph_info(const Graph& g);

}  // namespace mpucb
