#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mpucb/estimators.hpp"

namespace mpucb {

enum class PolicyKind { Decentralized, Centralized, Kmp, Consensus, Independent };
enum class EstimatorKind { OnlineTrimmed, MedianOfMeans, Catoni, Empirical };

std::string_view to_string(PolicyKind kind);
std::string_view to_string(EstimatorKind kind);
std::optional<PolicyKind> parse_policy(std::string_view name);
std::optional<EstimatorKind> parse_estimator(std::string_view name);
const std::vector<PolicyKind>& all_policies();

// Robust mean and sample count of one arm as seen by one agent.
struct ArmEstimate {
  double mean = 0.0;
  std::int64_t count = 0;
};

// Index of the largest value, ties to the lowest index.
int argmax_lowest(std::span<const double> values);

// argmax_k mean_k + confidence_radius(count_k, t); ties to the lowest arm.
// Throws std::logic_error if some arm has no samples.
int robust_ucb_argmax(std::span<const ArmEstimate> arms, const RateParams& params, int t);

// Rounds are 1-based, arms 0-based: rounds 1..K pull arm t-1.
std::optional<int> initialization_arm(int t, int num_arms);

int decentralized_act(std::span<const ArmEstimate> arms, const RateParams& params, int t);

struct FollowerView {
  bool is_leader = false;
  int distance_to_leader = 0;
  int last_leader_action = 0;  // A*_v
};

// Leaders, and followers still inside the warm-up window t <= K + d(v, l(v)),
// run the robust UCB rule; other followers replay A*_v.
int centralized_act(std::span<const ArmEstimate> arms, const FollowerView& view,
                    const RateParams& params, int t);

// One row of the KMP table: the freshest (estimate, count) vector known
// from `agent`.
struct KmpEntry {
  int agent = 0;
  std::span<const ArmEstimate> arms;
};

// Per arm, the entry with the largest count wins (ties: own entry, then
// lowest agent id); act on the UCB built from the winners.
int kmp_act(std::span<const ArmEstimate> own, int self, std::span<const KmpEntry> neighbors,
            const RateParams& params, int t);

// Per-arm (estimate, count) pairs chosen by the KMP rule.
std::vector<ArmEstimate> kmp_select(std::span<const ArmEstimate> own, int self,
                                    std::span<const KmpEntry> neighbors);

// sqrt(6 rho t^(2/3) / M * (n + eps_agent) / n^2); +inf when n <= 0.
double consensus_radius(double n_hat, double rho, double eps_agent, int num_agents, int t);

// argmax_k s_k / n_k + consensus_radius(n_k, ...), round-robin for t <= K.
int consensus_act(std::span<const double> s_hat, std::span<const double> n_hat, double rho,
                  double eps_agent, int num_agents, int t);

}  // namespace mpucb
