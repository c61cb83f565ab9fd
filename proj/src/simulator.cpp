#include "mpucb/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mpucb {

SampleStore::SampleStore(EstimatorKind kind, std::shared_ptr<const TrimmedThresholds> thresholds,
                         double v)
    : kind_(kind), v_(v) {
  if (kind_ == EstimatorKind::OnlineTrimmed) online_.emplace(std::move(thresholds));
}

void SampleStore::push(double x, int round) {
  ++n_;
  switch (kind_) {
    case EstimatorKind::OnlineTrimmed: online_->push(x, round); break;
    case EstimatorKind::Empirical: sum_ += x; break;
    default: samples_.push_back(x); break;
  }
}

double SampleStore::estimate(int t) {
  const double delta = 1.0 / (static_cast<double>(t) * t);
  switch (kind_) {
    case EstimatorKind::OnlineTrimmed: return online_->read(t);
    case EstimatorKind::Empirical: return sum_ / static_cast<double>(n_);
    case EstimatorKind::MedianOfMeans: return median_of_means(samples_, delta);
    case EstimatorKind::Catoni:
      // Too few samples for the influence scale to exist.
      if (static_cast<double>(n_) <= 2.0 * std::log(1.0 / delta)) return empirical_mean(samples_);
      return catoni_mean(samples_, v_, delta);
  }
  return 0.0;
}

std::vector<ArmEstimate> AgentState::estimates(int t) {
  std::vector<ArmEstimate> out(stores.size());
  for (std::size_t k = 0; k < stores.size(); ++k) {
    out[k].count = stores[k].size();
    if (out[k].count > 0) out[k].mean = stores[k].estimate(t);
  }
  return out;
}

Topology make_topology(const Graph& g, int gamma) {
  if (g.num_vertices() < 1) throw ConfigError("graph has no vertices");
  if (!g.is_connected()) throw ConfigError("communication graph must be connected");
  Topology topo;
  topo.dist = bfs_distances(g);
  topo.diameter = topo.dist.diameter();
  if (gamma < 0 || gamma > topo.diameter)
    throw ConfigError("gamma " + std::to_string(gamma) + " outside [0, " +
                      std::to_string(topo.diameter) + "]");
  topo.gamma = gamma;
  topo.power = power_graph(topo.dist, gamma);
  topo.cover = greedy_clique_cover(topo.power);
  topo.leaders = assign_leaders(topo.power);
  return topo;
}

std::vector<std::pair<int, int>> Topology::information_neighborhood(int v, PolicyKind policy) const {
  std::vector<std::pair<int, int>> out;
  const int m = dist.size();
  for (int w = 0; w < m; ++w) {
    const int d = dist(v, w);
    bool in = false;
    switch (policy) {
      case PolicyKind::Consensus: break;  // keeps no sample stores
      case PolicyKind::Independent: in = (w == v); break;
      case PolicyKind::Decentralized: in = cover.same_block(v, w); break;
      case PolicyKind::Centralized:
      case PolicyKind::Kmp: in = d <= gamma; break;
    }
    if (in) out.emplace_back(w, d);
  }
  return out;
}

double draw_reward(const BanditInstance& instance, std::uint64_t seed, int agent, int round,
                   int arm) {
  SplitMix64 rng(derive_seed(seed, agent, round, arm));
  return sample(instance.arms[arm], rng);
}

std::pair<std::vector<double>, std::vector<double>> consensus_step(
    const std::vector<double>& s_hat, const std::vector<double>& n_hat,
    const std::vector<double>& zeta, const std::vector<double>& r,
    const ConsensusSpectrum& spectrum) {
  const int m = spectrum.m;
  if (static_cast<int>(s_hat.size()) != m || static_cast<int>(n_hat.size()) != m ||
      static_cast<int>(zeta.size()) != m || static_cast<int>(r.size()) != m)
    throw ConfigError("consensus vectors must have one entry per agent");
  std::vector<double> s_in(m), n_in(m);
  for (int i = 0; i < m; ++i) {
    s_in[i] = s_hat[i] + r[i] * zeta[i];
    n_in[i] = n_hat[i] + zeta[i];
  }
  std::vector<double> s_out(m, 0.0), n_out(m, 0.0);
  for (int i = 0; i < m; ++i) {
    double s = 0.0, n = 0.0;
    for (int j = 0; j < m; ++j) {
      const double p = spectrum.p_at(i, j);
      s += p * s_in[j];
      n += p * n_in[j];
    }
    s_out[i] = s;
    n_out[i] = n;
  }
  return {std::move(s_out), std::move(n_out)};
}

RunResult run(const BanditInstance& instance, const Graph& graph, const SimConfig& config) {
  const bool uses_gamma =
      config.policy != PolicyKind::Independent && config.policy != PolicyKind::Consensus;
  return run(instance, graph, make_topology(graph, uses_gamma ? config.gamma : 0), config);
}

RunResult run(const BanditInstance& instance, const Graph& graph, const Topology& topo,
              const SimConfig& config) {
  const int m = graph.num_vertices();
  const int k_arms = instance.num_arms();
  const int horizon = config.horizon;
  if (horizon < 1) throw ConfigError("horizon must be at least 1");
  if (k_arms < 1) throw ConfigError("instance has no arms");
  if (topo.dist.size() != m) throw ConfigError("topology does not match the graph");

  const PolicyKind policy = config.policy;
  int gamma = topo.gamma;
  if (policy == PolicyKind::Independent || policy == PolicyKind::Consensus) gamma = 0;
  if (gamma < 0 || gamma > topo.diameter) throw ConfigError("gamma outside [0, diameter]");

  RateParams params{config.c, instance.v, instance.eps};
  try {
    params.validate();
  } catch (const EstimatorError& e) {
    throw ConfigError(e.what());
  }

  std::optional<ConsensusSpectrum> spectrum;
  std::vector<std::vector<double>> s_hat, n_hat;  // [arm][agent]
  if (policy == PolicyKind::Consensus) {
    if (!(config.kappa > 0.0 && config.kappa < 1.0)) throw ConfigError("kappa must lie in (0, 1)");
    spectrum = consensus_spectrum(graph, config.kappa);
    s_hat.assign(k_arms, std::vector<double>(m, 0.0));
    n_hat.assign(k_arms, std::vector<double>(m, 0.0));
  }

  auto thresholds = std::make_shared<const TrimmedThresholds>(instance.u, instance.eps, horizon);
  std::vector<AgentState> agents(m);
  for (auto& a : agents) {
    for (int k = 0; k < k_arms; ++k) a.stores.emplace_back(config.estimator, thresholds, instance.v);
    a.latest_birth.assign(m, 0);
    if (policy == PolicyKind::Kmp) a.kmp_table.assign(m, nullptr);
  }

  RunResult result;
  result.trace.cumulative.assign(static_cast<std::size_t>(horizon) + 1, 0.0);
  result.trace.pulls.assign(m, std::vector<std::int64_t>(k_arms, 0));

  Instrumentation* instr = nullptr;
  if (config.instrument) {
    result.instr.emplace();
    instr = &*result.instr;
    instr->num_agents = m;
    instr->num_arms = k_arms;
    instr->samples.assign(m, std::vector<std::vector<SampleTag>>(k_arms));
    for (int v = 0; v < m; ++v) instr->neighborhood.push_back(topo.information_neighborhood(v, policy));
    if (spectrum) instr->consensus_epsilon = spectrum->epsilon;
  }

  std::vector<int> action(m);
  std::vector<double> reward(m);
  std::vector<std::shared_ptr<const KmpPayload>> own_payload(m);
  std::vector<std::vector<Message>> outgoing(m), next_inbox(m);

  auto incorporate = [&](int v, int arm, int origin, int birth, double x, int round) {
    agents[v].stores[arm].push(x, round);
    if (instr) instr->samples[v][arm].push_back({origin, birth, x, round});
  };

  for (int t = 1; t <= horizon; ++t) {
    // (1) act
    for (int v = 0; v < m; ++v) {
      AgentState& a = agents[v];
      switch (policy) {
        case PolicyKind::Decentralized:
        case PolicyKind::Independent:
          action[v] = decentralized_act(a.estimates(t), params, t);
          break;
        case PolicyKind::Centralized: {
          FollowerView view;
          const int leader = topo.leaders.leader_of[v];
          view.is_leader = leader == v;
          view.distance_to_leader = topo.dist(v, leader);
          view.last_leader_action = a.last_leader_action;
          const bool replay = !view.is_leader && t > k_arms + view.distance_to_leader;
          action[v] = replay ? centralized_act({}, view, params, t)
                             : centralized_act(a.estimates(t), view, params, t);
          break;
        }
        case PolicyKind::Kmp: {
          auto own = std::make_shared<const KmpPayload>(a.estimates(t));
          std::vector<KmpEntry> table;
          for (int w = 0; w < m; ++w)
            if (a.kmp_table[w]) table.push_back({w, *a.kmp_table[w]});
          action[v] = kmp_act(*own, v, table, params, t);
          own_payload[v] = std::move(own);
          break;
        }
        case PolicyKind::Consensus: {
          std::vector<double> s(k_arms), n(k_arms);
          for (int k = 0; k < k_arms; ++k) {
            s[k] = s_hat[k][v];
            n[k] = n_hat[k][v];
          }
          action[v] = consensus_act(s, n, instance.v, spectrum->epsilon_k[v], m, t);
          break;
        }
      }
    }

    // draw rewards and keep own samples
    double round_regret = 0.0;
    for (int v = 0; v < m; ++v) {
      const int arm = action[v];
      reward[v] = draw_reward(instance, config.seed, v, t, arm);
      round_regret += instance.gaps[arm];
      ++result.trace.pulls[v][arm];
      if (policy != PolicyKind::Consensus) incorporate(v, arm, v, t, reward[v], t);
    }
    result.trace.cumulative[t] = result.trace.cumulative[t - 1] + round_regret;

    // (2) emit and forward
    if (gamma > 0) {
      for (int v = 0; v < m; ++v) {
        auto& out = outgoing[v];
        out.clear();
        out.push_back({v, t, action[v], reward[v], gamma,
                       policy == PolicyKind::Kmp ? own_payload[v] : nullptr});
        for (auto& msg : agents[v].inbox)
          if (msg.life > 0) out.push_back(std::move(msg));
        agents[v].inbox.clear();
      }
      // (3) collect
      for (int v = 0; v < m; ++v) {
        AgentState& a = agents[v];
        auto& inbox = next_inbox[v];
        inbox.clear();
        for (int w : graph.neighbors(v)) {
          for (const Message& msg : outgoing[w]) {
            if (msg.origin == v || msg.birth <= a.latest_birth[msg.origin]) continue;
            a.latest_birth[msg.origin] = msg.birth;
            if (policy != PolicyKind::Decentralized || topo.cover.same_block(v, msg.origin))
              incorporate(v, msg.arm, msg.origin, msg.birth, msg.reward, t);
            if (policy == PolicyKind::Centralized && msg.origin == topo.leaders.leader_of[v] &&
                msg.birth > a.last_leader_birth) {
              a.last_leader_birth = msg.birth;
              a.last_leader_action = msg.arm;
            }
            if (policy == PolicyKind::Kmp) a.kmp_table[msg.origin] = msg.payload;
            if (msg.life - 1 > 0) {
              Message fwd = msg;
              fwd.life -= 1;
              inbox.push_back(std::move(fwd));
            }
          }
        }
      }
      for (int v = 0; v < m; ++v) agents[v].inbox.swap(next_inbox[v]);
    }

    if (policy == PolicyKind::Consensus) {
      std::vector<double> zeta(m), r(m);
      for (int k = 0; k < k_arms; ++k) {
        for (int v = 0; v < m; ++v) {
          zeta[v] = action[v] == k ? 1.0 : 0.0;
          r[v] = action[v] == k ? reward[v] : 0.0;
        }
        auto [s2, n2] = consensus_step(s_hat[k], n_hat[k], zeta, r, *spectrum);
        s_hat[k] = std::move(s2);
        n_hat[k] = std::move(n2);
      }
    }

    if (instr) {
      instr->actions.push_back(action);
      instr->rewards.push_back(reward);
      std::vector<std::int64_t> sizes(static_cast<std::size_t>(m) * k_arms);
      std::vector<std::int64_t> counts(sizes.size());
      for (int v = 0; v < m; ++v)
        for (int k = 0; k < k_arms; ++k) {
          sizes[v * k_arms + k] = agents[v].stores[k].size();
          counts[v * k_arms + k] = result.trace.pulls[v][k];
        }
      instr->store_sizes.push_back(std::move(sizes));
      instr->pull_counts.push_back(std::move(counts));
      if (spectrum) {
        std::vector<double> snap(static_cast<std::size_t>(m) * k_arms);
        for (int v = 0; v < m; ++v)
          for (int k = 0; k < k_arms; ++k) snap[v * k_arms + k] = n_hat[k][v];
        instr->consensus_counts.push_back(std::move(snap));
      }
    }
  }
  return result;
}

std::vector<CountViolation> check_sample_count_bounds(const Instrumentation& instr) {
  std::vector<CountViolation> out;
  const int m = instr.num_agents, k_arms = instr.num_arms;
  for (std::size_t idx = 0; idx < instr.store_sizes.size(); ++idx) {
    const auto& sizes = instr.store_sizes[idx];
    const auto& counts = instr.pull_counts[idx];
    for (int v = 0; v < m; ++v) {
      for (int k = 0; k < k_arms; ++k) {
        std::int64_t n = 0, slack = 0;
        for (auto [w, d] : instr.neighborhood[v]) {
          n += counts[w * k_arms + k];
          if (w != v) slack += d - 1;
        }
        const std::int64_t s = sizes[v * k_arms + k];
        const std::int64_t lower = std::max<std::int64_t>(0, n - slack);
        if (s > n || s < lower)
          out.push_back({v, k, static_cast<int>(idx) + 1, s, lower, n});
      }
    }
  }
  return out;
}

double max_consensus_deviation(const Instrumentation& instr) {
  const int m = instr.num_agents, k_arms = instr.num_arms;
  double worst = 0.0;
  for (std::size_t idx = 0; idx < instr.consensus_counts.size(); ++idx) {
    const auto& nh = instr.consensus_counts[idx];
    const auto& counts = instr.pull_counts[idx];
    for (int k = 0; k < k_arms; ++k) {
      double total = 0.0;
      for (int v = 0; v < m; ++v) total += static_cast<double>(counts[v * k_arms + k]);
      for (int v = 0; v < m; ++v)
        worst = std::max(worst, std::abs(nh[v * k_arms + k] - total / m));
    }
  }
  return worst;
}

}  // namespace mpucb
