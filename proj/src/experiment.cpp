#include "mpucb/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace mpucb {

using nlohmann::json;

int GammaSpec::resolve(int diameter) const {
  switch (kind) {
    case Kind::HalfDiameter: return diameter / 2;
    case Kind::Diameter: return diameter;
    case Kind::Value: return std::min(value, diameter);
  }
  return 0;
}

std::string GammaSpec::label() const {
  switch (kind) {
    case Kind::HalfDiameter: return "half";
    case Kind::Diameter: return "diam";
    case Kind::Value: return std::to_string(value);
  }
  return "?";
}

namespace {

bool gamma_less(const GammaSpec& a, const GammaSpec& b) {
  if (a.kind != b.kind) return a.kind < b.kind;
  return a.value < b.value;
}

GammaSpec parse_gamma_value(const json& j) {
  if (j.is_number_integer()) {
    const int g = j.get<int>();
    if (g < 0) throw ConfigError("gamma must be nonnegative");
    return GammaSpec::of(g);
  }
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "half-diameter") return {GammaSpec::Kind::HalfDiameter, 0};
    if (s == "diameter") return {GammaSpec::Kind::Diameter, 0};
    throw ConfigError("unknown gamma '" + s + "'");
  }
  throw ConfigError("gamma must be an integer, \"half-diameter\" or \"diameter\"");
}

std::vector<GammaSpec> parse_gamma_list(const json& j) {
  std::vector<GammaSpec> out;
  if (j.is_array()) {
    for (const auto& x : j) out.push_back(parse_gamma_value(x));
  } else {
    out.push_back(parse_gamma_value(j));
  }
  if (out.empty()) throw ConfigError("gamma list is empty");
  return out;
}

template <class T>
void read_field(const json& obj, const char* key, T& dst) {
  if (auto it = obj.find(key); it != obj.end()) {
    try {
      dst = it->get<T>();
    } catch (const json::exception&) {
      throw ConfigError(std::string("field '") + key + "' has the wrong type");
    }
  }
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const char* where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return it.key() == k; }))
      throw ConfigError(std::string("unknown ") + where + " field '" + it.key() + "'");
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  static const std::set<std::string> graph_types{"er", "ba", "edgelist", "complete", "path", "star"};
  if (!graph_types.count(graph.type)) throw ConfigError("unknown graph type '" + graph.type + "'");
  if (graph.type == "edgelist") {
    if (graph.path.empty()) throw ConfigError("edgelist graph needs a path");
    if (graph.subgraph < 0) throw ConfigError("subgraph size must be nonnegative");
  } else if (graph.agents < 1) {
    throw ConfigError("graph needs at least one agent");
  }
  if (graph.type == "er" && !(graph.p > 0.0 && graph.p <= 1.0)) throw ConfigError("ER p must lie in (0, 1]");
  if (graph.type == "ba" && !(graph.attach >= 1 && graph.attach < graph.agents))
    throw ConfigError("BA attach must lie in [1, agents)");

  if (instance.type != "stable" && instance.type != "hard" && instance.type != "gaussian")
    throw ConfigError("unknown instance type '" + instance.type + "'");
  if (instance.arms < 2) throw ConfigError("instance needs at least two arms");
  if (policies.empty()) throw ConfigError("policy list is empty");
  if (horizon < 1) throw ConfigError("horizon must be at least 1");
  if (repetitions < 1) throw ConfigError("repetitions must be at least 1");
  if (gamma.empty()) throw ConfigError("gamma list is empty");
  if (!(kappa > 0.0 && kappa < 1.0)) throw ConfigError("kappa must lie in (0, 1)");
  if (!(c > 0.0)) throw ConfigError("c must be positive");
  if (threads < 0) throw ConfigError("threads must be nonnegative");
}

ExperimentConfig parse_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j,
                 {"graph", "instance", "policies", "horizon", "repetitions", "seed", "gamma",
                  "gamma_sweep", "alpha_sweep", "estimator", "kappa", "c", "output", "threads"},
                 "config");

  ExperimentConfig cfg;
  if (auto it = j.find("graph"); it != j.end()) {
    if (!it->is_object()) throw ConfigError("graph must be an object");
    reject_unknown(*it, {"type", "agents", "p", "attach", "path", "subgraph"}, "graph");
    read_field(*it, "type", cfg.graph.type);
    read_field(*it, "agents", cfg.graph.agents);
    read_field(*it, "p", cfg.graph.p);
    read_field(*it, "attach", cfg.graph.attach);
    read_field(*it, "path", cfg.graph.path);
    read_field(*it, "subgraph", cfg.graph.subgraph);
  }
  if (auto it = j.find("instance"); it != j.end()) {
    if (!it->is_object()) throw ConfigError("instance must be an object");
    reject_unknown(*it, {"type", "arms", "alpha", "gap", "eps", "std"}, "instance");
    read_field(*it, "type", cfg.instance.type);
    read_field(*it, "arms", cfg.instance.arms);
    read_field(*it, "alpha", cfg.instance.alpha);
    read_field(*it, "gap", cfg.instance.gap);
    read_field(*it, "eps", cfg.instance.eps);
    read_field(*it, "std", cfg.instance.std);
  }
  if (auto it = j.find("policies"); it != j.end()) {
    if (!it->is_array()) throw ConfigError("policies must be a list");
    cfg.policies.clear();
    for (const auto& p : *it) {
      if (!p.is_string()) throw ConfigError("policy names must be strings");
      auto kind = parse_policy(p.get<std::string>());
      if (!kind) throw ConfigError("unknown policy '" + p.get<std::string>() + "'");
      cfg.policies.push_back(*kind);
    }
  }
  read_field(j, "horizon", cfg.horizon);
  read_field(j, "repetitions", cfg.repetitions);
  read_field(j, "seed", cfg.seed);
  if (auto it = j.find("gamma"); it != j.end()) cfg.gamma = parse_gamma_list(*it);
  if (auto it = j.find("gamma_sweep"); it != j.end()) {
    if (!(it->is_string() && it->get<std::string>() == "full")) cfg.gamma_sweep = parse_gamma_list(*it);
  }
  if (auto it = j.find("alpha_sweep"); it != j.end()) {
    read_field(j, "alpha_sweep", cfg.alpha_sweep);
    if (cfg.alpha_sweep.empty()) throw ConfigError("alpha_sweep is empty");
  }
  if (auto it = j.find("estimator"); it != j.end()) {
    if (!it->is_string()) throw ConfigError("estimator must be a string");
    auto kind = parse_estimator(it->get<std::string>());
    if (!kind) throw ConfigError("unknown estimator '" + it->get<std::string>() + "'");
    cfg.estimator = *kind;
  }
  read_field(j, "kappa", cfg.kappa);
  read_field(j, "c", cfg.c);
  read_field(j, "output", cfg.output);
  read_field(j, "threads", cfg.threads);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

Graph build_graph(const GraphSpec& spec, std::uint64_t rep_seed) {
  Rng rng(derive_seed(rep_seed, 1));
  if (spec.type == "er") return generate_er(spec.agents, spec.p, rng);
  if (spec.type == "ba") return generate_ba(spec.agents, spec.attach, rng);
  if (spec.type == "complete") return Graph::complete(spec.agents);
  if (spec.type == "path") return Graph::path(spec.agents);
  if (spec.type == "star") return Graph::star(spec.agents - 1);
  if (spec.type == "edgelist") {
    Graph full = load_edge_list_file(spec.path);
    if (spec.subgraph > 0) return sample_connected_subgraph(full, spec.subgraph, rng);
    return full;
  }
  throw ConfigError("unknown graph type '" + spec.type + "'");
}

BanditInstance build_instance(const InstanceSpec& spec, double alpha, std::uint64_t rep_seed) {
  Rng rng(derive_seed(rep_seed, 2));
  try {
    if (spec.type == "stable") return make_stable_instance(spec.arms, alpha, rng);
    if (spec.type == "hard") return make_hard_instance(spec.arms, spec.gap, spec.eps);
    if (spec.type == "gaussian") return make_gaussian_instance(spec.arms, spec.std, rng);
  } catch (const InstanceError& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown instance type '" + spec.type + "'");
}

std::uint64_t reward_seed(std::uint64_t rep_seed) { return derive_seed(rep_seed, 3); }

ExperimentResult run_grid(const ExperimentConfig& config, const std::vector<GammaSpec>& gammas,
                          const std::vector<double>& alphas) {
  config.validate();
  if (gammas.empty() || alphas.empty()) throw ConfigError("sweep lists must be nonempty");

  std::vector<GammaSpec> gs = gammas;
  std::sort(gs.begin(), gs.end(), gamma_less);
  gs.erase(std::unique(gs.begin(), gs.end()), gs.end());
  std::vector<double> as = alphas;
  std::sort(as.begin(), as.end());
  as.erase(std::unique(as.begin(), as.end()), as.end());
  std::vector<PolicyKind> ps = config.policies;
  std::sort(ps.begin(), ps.end());
  ps.erase(std::unique(ps.begin(), ps.end()), ps.end());

  const int reps = config.repetitions;
  std::vector<Graph> graphs;
  for (int r = 0; r < reps; ++r) {
    Graph g = build_graph(config.graph, config.seed + r);
    if (!g.is_connected()) throw ConfigError("graph of repetition " + std::to_string(r) + " is not connected");
    graphs.push_back(std::move(g));
  }
  std::vector<std::vector<BanditInstance>> instances(as.size());
  for (std::size_t a = 0; a < as.size(); ++a)
    for (int r = 0; r < reps; ++r)
      instances[a].push_back(build_instance(config.instance, as[a], config.seed + r));

  std::vector<SweepPoint> points;
  for (PolicyKind p : ps)
    for (const auto& g : gs)
      for (double a : as) points.push_back({p, g, a});

  struct Item {
    std::vector<double> cumulative;
    int gamma = 0;
    std::size_t blocks = 0;
    std::size_t mwis = 0;
    double lower_bound = 0.0;
  };
  const std::size_t total = points.size() * static_cast<std::size_t>(reps);
  std::vector<Item> items(total);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= total) return;
      const std::size_t pi = idx / reps;
      const int r = static_cast<int>(idx % reps);
      try {
        const SweepPoint& pt = points[pi];
        const std::size_t ai = std::find(as.begin(), as.end(), pt.alpha) - as.begin();
        const Graph& g = graphs[r];
        const BanditInstance& inst = instances[ai][r];
        const int diameter = bfs_distances(g).diameter();
        const int gamma = pt.gamma.resolve(diameter);
        Topology topo = make_topology(g, gamma);
        SimConfig sim;
        sim.horizon = config.horizon;
        sim.gamma = gamma;
        sim.seed = reward_seed(config.seed + r);
        sim.policy = pt.policy;
        sim.estimator = config.estimator;
        sim.kappa = config.kappa;
        sim.c = config.c;
        Item& it = items[idx];
        it.cumulative = run(inst, g, topo, sim).trace.cumulative;
        it.gamma = gamma;
        it.blocks = topo.cover.num_blocks();
        it.mwis = topo.leaders.leaders.size();
        it.lower_bound = lower_bound_reference(inst, inst.eps, config.horizon);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(total);
      }
    }
  };

  int threads = config.threads > 0 ? config.threads
                                   : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = static_cast<int>(std::min<std::size_t>(threads, total));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentResult result;
  result.horizon = config.horizon;
  const std::size_t len = static_cast<std::size_t>(config.horizon) + 1;
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    CurveResult c;
    c.point = points[pi];
    c.mean.assign(len, 0.0);
    c.std.assign(len, 0.0);
    for (int r = 0; r < reps; ++r) {
      const Item& it = items[pi * reps + r];
      for (std::size_t t = 0; t < len; ++t) c.mean[t] += it.cumulative[t];
      c.final_per_rep.push_back(it.cumulative.back());
      c.gamma_effective += it.gamma;
      c.clique_blocks += static_cast<double>(it.blocks);
      c.mwis_size += static_cast<double>(it.mwis);
      c.lower_bound += it.lower_bound;
    }
    for (double& x : c.mean) x /= reps;
    c.gamma_effective /= reps;
    c.clique_blocks /= reps;
    c.mwis_size /= reps;
    // Identical per-repetition references are reported without rounding.
    const double first_lb = items[pi * reps].lower_bound;
    bool same_lb = true;
    for (int r = 1; r < reps; ++r) same_lb = same_lb && items[pi * reps + r].lower_bound == first_lb;
    c.lower_bound = same_lb ? first_lb : c.lower_bound / reps;
    if (reps > 1) {
      for (int r = 0; r < reps; ++r) {
        const Item& it = items[pi * reps + r];
        for (std::size_t t = 0; t < len; ++t) {
          const double d = it.cumulative[t] - c.mean[t];
          c.std[t] += d * d;
        }
      }
      for (double& x : c.std) x = std::sqrt(x / (reps - 1));
    }
    result.curves.push_back(std::move(c));
  }
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  return run_grid(config, config.gamma, {config.instance.alpha});
}

ExperimentResult ablation_gamma(const ExperimentConfig& config) {
  std::vector<GammaSpec> gammas = config.gamma_sweep;
  if (gammas.empty()) {
    int largest = 0;
    for (int r = 0; r < config.repetitions; ++r)
      largest = std::max(largest, bfs_distances(build_graph(config.graph, config.seed + r)).diameter());
    for (int g = 0; g <= largest; ++g) gammas.push_back(GammaSpec::of(g));
  }
  return run_grid(config, gammas, {config.instance.alpha});
}

ExperimentResult ablation_alpha(const ExperimentConfig& config) {
  if (config.instance.type != "stable") throw ConfigError("alpha sweep needs a stable instance");
  if (config.alpha_sweep.empty()) throw ConfigError("alpha_sweep is empty");
  return run_grid(config, config.gamma, config.alpha_sweep);
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string curve_filename(const SweepPoint& point) {
  char alpha[32];
  std::snprintf(alpha, sizeof alpha, "%g", point.alpha);
  return "curve_" + std::string(to_string(point.policy)) + "_g" + point.gamma.label() + "_a" + alpha +
         ".csv";
}

void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());

  auto open = [&](const std::string& name) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + (dir / name).string());
    return out;
  };

  for (const auto& c : result.curves) {
    auto out = open(curve_filename(c.point));
    out << "round,mean_regret,std_regret\n";
    for (std::size_t t = 0; t < c.mean.size(); ++t)
      out << t << ',' << format_double(c.mean[t]) << ',' << format_double(c.std[t]) << '\n';
  }

  auto out = open("summary.csv");
  out << "policy,gamma,gamma_effective,alpha,horizon,mean_regret,std_regret,lower_bound,"
         "clique_blocks,mwis_size\n";
  for (const auto& c : result.curves) {
    out << to_string(c.point.policy) << ',' << c.point.gamma.label() << ','
        << format_double(c.gamma_effective) << ',' << format_double(c.point.alpha) << ','
        << result.horizon << ',' << format_double(c.final_mean()) << ','
        << format_double(c.final_std()) << ',' << format_double(c.lower_bound) << ','
        << format_double(c.clique_blocks) << ',' << format_double(c.mwis_size) << '\n';
  }
}

std::string graph_info(const Graph& g) {
  std::ostringstream os;
  os << "vertices: " << g.num_vertices() << '\n';
  os << "edges: " << g.num_edges() << '\n';
  os << "max_degree: " << g.max_degree() << '\n';
  const bool connected = g.is_connected();
  os << "connected: " << (connected ? "yes" : "no") << '\n';
  if (!connected) return os.str();
  const DistanceMatrix dist = bfs_distances(g);
  const int diameter = dist.diameter();
  os << "diameter: " << diameter << '\n';
  os << "gamma,clique_blocks,mwis_size\n";
  for (int gamma = 0; gamma <= diameter; ++gamma) {
    const Graph pg = power_graph(dist, gamma);
    os << gamma << ',' << greedy_clique_cover(pg).num_blocks() << ','
       << assign_leaders(pg).leaders.size() << '\n';
  }
  return os.str();
}

}  // namespace mpucb
