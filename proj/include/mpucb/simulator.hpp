#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mpucb/estimators.hpp"
#include "mpucb/graph.hpp"
#include "mpucb/policies.hpp"
#include "mpucb/rewards.hpp"

namespace mpucb {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using KmpPayload = std::vector<ArmEstimate>;

struct Message {
  int origin = 0;
  int birth = 0;
  int arm = 0;
  double reward = 0.0;
  int life = 0;
  std::shared_ptr<const KmpPayload> payload;  // KMP only
};

struct SimConfig {
  int horizon = 1000;
  int gamma = 0;
  std::uint64_t seed = 0;
  PolicyKind policy = PolicyKind::Decentralized;
  EstimatorKind estimator = EstimatorKind::OnlineTrimmed;
  double kappa = 0.5;
  double c = 1.0;
  bool instrument = false;
};

// One agent's samples of one arm, behind the configured estimator.
class SampleStore {
 public:
  SampleStore(EstimatorKind kind, std::shared_ptr<const TrimmedThresholds> thresholds, double v);

  void push(double x, int round);
  std::int64_t size() const { return n_; }

  // Robust mean at round t with delta = 1/t^2. Needs size() > 0 and t >= 2.
  double estimate(int t);

 private:
  EstimatorKind kind_;
  std::optional<OnlineTrimmedMean> online_;
  std::vector<double> samples_;
  double sum_ = 0.0;
  double v_;
  std::int64_t n_ = 0;
};

struct AgentState {
  std::vector<SampleStore> stores;
  std::vector<Message> inbox;        // received last round, forwarded this round
  std::vector<int> latest_birth;     // per origin; 0 = nothing seen
  int last_leader_action = 0;
  int last_leader_birth = 0;
  std::vector<std::shared_ptr<const KmpPayload>> kmp_table;  // per origin

  std::vector<ArmEstimate> estimates(int t);
};

// Graph-derived structures shared by every agent of one run.
struct Topology {
  DistanceMatrix dist;
  int diameter = 0;
  int gamma = 0;
  Graph power;
  CliqueCover cover;
  LeaderAssignment leaders;

  // Agents whose pulls agent v can learn about under `policy`, with their
  // hop distance (v itself at distance 0).
  std::vector<std::pair<int, int>> information_neighborhood(int v, PolicyKind policy) const;
};

Topology make_topology(const Graph& g, int gamma);

struct RegretTrace {
  std::vector<double> cumulative;                 // T + 1 entries, [0] = 0
  std::vector<std::vector<std::int64_t>> pulls;   // [agent][arm]

  double final_regret() const { return cumulative.back(); }
};

struct SampleTag {
  int origin = 0;
  int birth = 0;
  double reward = 0.0;
  int incorporated = 0;  // round at whose end the sample entered the store
};

// Per-round records of an instrumented run. Round t lives at index t - 1;
// per-round vectors are flattened as [agent * K + arm].
struct Instrumentation {
  int num_agents = 0;
  int num_arms = 0;
  std::vector<std::vector<int>> actions;
  std::vector<std::vector<double>> rewards;
  std::vector<std::vector<std::vector<SampleTag>>> samples;  // [agent][arm]
  std::vector<std::vector<std::int64_t>> store_sizes;
  std::vector<std::vector<std::int64_t>> pull_counts;
  std::vector<std::vector<std::pair<int, int>>> neighborhood;
  std::vector<std::vector<double>> consensus_counts;  // n_hat after the round's update
  double consensus_epsilon = 0.0;
};

struct RunResult {
  RegretTrace trace;
  std::optional<Instrumentation> instr;
};

// Executes T synchronous rounds: act and draw, emit and forward, collect.
RunResult run(const BanditInstance& instance, const Graph& graph, const SimConfig& config);
RunResult run(const BanditInstance& instance, const Graph& graph, const Topology& topology,
              const SimConfig& config);

struct CountViolation {
  int agent = 0;
  int arm = 0;
  int round = 0;
  std::int64_t store_size = 0;
  std::int64_t lower = 0;
  std::int64_t upper = 0;
};

// N(t) - sum (d - 1) <= |S_k^v(t)| <= N(t), where N(t) counts pulls of arm
// k through round t over v's information neighbourhood.
std::vector<CountViolation> check_sample_count_bounds(const Instrumentation& instr);

// Largest |n_hat_k^v(t) - N_k(t) / M| over the run.
double max_consensus_deviation(const Instrumentation& instr);

// s' = P (s + r o zeta), n' = P (n + zeta) for one arm.
std::pair<std::vector<double>, std::vector<double>> consensus_step(
    const std::vector<double>& s_hat, const std::vector<double>& n_hat,
    const std::vector<double>& zeta, const std::vector<double>& r,
    const ConsensusSpectrum& spectrum);

// Reward of agent's pull of `arm` at `round`; a pure function of its keys.
double draw_reward(const BanditInstance& instance, std::uint64_t seed, int agent, int round,
                   int arm);

}  // namespace mpucb
