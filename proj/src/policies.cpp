#include "mpucb/policies.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mpucb {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Decentralized: return "decentralized";
    case PolicyKind::Centralized: return "centralized";
    case PolicyKind::Kmp: return "kmp";
    case PolicyKind::Consensus: return "consensus";
    case PolicyKind::Independent: return "independent";
  }
  return "unknown";
}

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::OnlineTrimmed: return "trimmed";
    case EstimatorKind::MedianOfMeans: return "median-of-means";
    case EstimatorKind::Catoni: return "catoni";
    case EstimatorKind::Empirical: return "empirical";
  }
  return "unknown";
}

std::optional<PolicyKind> parse_policy(std::string_view name) {
  for (PolicyKind k : all_policies())
    if (to_string(k) == name) return k;
  return std::nullopt;
}

std::optional<EstimatorKind> parse_estimator(std::string_view name) {
  for (EstimatorKind k : {EstimatorKind::OnlineTrimmed, EstimatorKind::MedianOfMeans,
                          EstimatorKind::Catoni, EstimatorKind::Empirical})
    if (to_string(k) == name) return k;
  return std::nullopt;
}

const std::vector<PolicyKind>& all_policies() {
  static const std::vector<PolicyKind> kinds{PolicyKind::Decentralized, PolicyKind::Centralized,
                                             PolicyKind::Kmp, PolicyKind::Consensus,
                                             PolicyKind::Independent};
  return kinds;
}

int argmax_lowest(std::span<const double> values) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(values.size()); ++k)
    if (values[k] > values[best]) best = k;
  return best;
}

int robust_ucb_argmax(std::span<const ArmEstimate> arms, const RateParams& params, int t) {
  std::vector<double> index(arms.size());
  for (std::size_t k = 0; k < arms.size(); ++k) {
    if (arms[k].count <= 0)
      throw std::logic_error("arm " + std::to_string(k) + " has no samples after initialization");
    index[k] = arms[k].mean + confidence_radius(params, static_cast<double>(arms[k].count), t);
  }
  return argmax_lowest(index);
}

std::optional<int> initialization_arm(int t, int num_arms) {
  if (t < 1) throw std::invalid_argument("rounds start at 1");
  if (t <= num_arms) return t - 1;
  return std::nullopt;
}

int decentralized_act(std::span<const ArmEstimate> arms, const RateParams& params, int t) {
  if (auto a = initialization_arm(t, static_cast<int>(arms.size()))) return *a;
  return robust_ucb_argmax(arms, params, t);
}

int centralized_act(std::span<const ArmEstimate> arms, const FollowerView& view,
                    const RateParams& params, int t) {
  const int k_arms = static_cast<int>(arms.size());
  if (auto a = initialization_arm(t, k_arms)) return *a;
  // The leader's first post-initialization choice reaches v at round K + d.
  if (view.is_leader || t <= k_arms + view.distance_to_leader) return robust_ucb_argmax(arms, params, t);
  return view.last_leader_action;
}

std::vector<ArmEstimate> kmp_select(std::span<const ArmEstimate> own, int self,
                                    std::span<const KmpEntry> neighbors) {
  std::vector<ArmEstimate> chosen(own.begin(), own.end());
  for (std::size_t k = 0; k < own.size(); ++k) {
    int owner = self;
    for (const KmpEntry& e : neighbors) {
      const ArmEstimate& cand = e.arms[k];
      if (cand.count > chosen[k].count ||
          (cand.count == chosen[k].count && owner != self && e.agent < owner)) {
        chosen[k] = cand;
        owner = e.agent;
      }
    }
  }
  return chosen;
}

int kmp_act(std::span<const ArmEstimate> own, int self, std::span<const KmpEntry> neighbors,
            const RateParams& params, int t) {
  if (auto a = initialization_arm(t, static_cast<int>(own.size()))) return *a;
  const auto chosen = kmp_select(own, self, neighbors);
  return robust_ucb_argmax(chosen, params, t);
}

double consensus_radius(double n_hat, double rho, double eps_agent, int num_agents, int t) {
  if (!(n_hat > 0.0)) return kInf;
  const double inflation = 6.0 * rho * std::pow(static_cast<double>(t), 2.0 / 3.0) / num_agents;
  return std::sqrt(inflation * (n_hat + eps_agent) / (n_hat * n_hat));
}

int consensus_act(std::span<const double> s_hat, std::span<const double> n_hat, double rho,
                  double eps_agent, int num_agents, int t) {
  const int k_arms = static_cast<int>(n_hat.size());
  if (auto a = initialization_arm(t, k_arms)) return *a;
  std::vector<double> index(k_arms);
  for (int k = 0; k < k_arms; ++k) {
    const double r = consensus_radius(n_hat[k], rho, eps_agent, num_agents, t);
    index[k] = (r == kInf) ? kInf : s_hat[k] / n_hat[k] + r;
  }
  return argmax_lowest(index);
}

}  // namespace mpucb
