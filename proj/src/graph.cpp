#include "mpucb/graph.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace mpucb {

Graph::Graph(int num_vertices) {
  if (num_vertices < 0) throw GraphError("negative vertex count");
  adj_.resize(static_cast<std::size_t>(num_vertices));
}

Graph::Graph(int num_vertices, const std::vector<std::pair<Vertex, Vertex>>& edges)
    : Graph(num_vertices) {
  for (const auto& [u, v] : edges) add_edge(u, v);
}

Graph Graph::complete(int m) {
  Graph g(m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) g.add_edge(i, j);
  return g;
}

Graph Graph::path(int m) {
  Graph g(m);
  for (int i = 0; i + 1 < m; ++i) g.add_edge(i, i + 1);
  return g;
}

Graph Graph::star(int leaves) {
  Graph g(leaves + 1);
  for (int i = 1; i <= leaves; ++i) g.add_edge(0, i);
  return g;
}

Graph Graph::cycle(int m) {
  Graph g = path(m);
  if (m >= 3) g.add_edge(m - 1, 0);
  return g;
}

bool Graph::add_edge(Vertex u, Vertex v) {
  const int m = num_vertices();
  if (u < 0 || v < 0 || u >= m || v >= m) throw GraphError("edge endpoint out of range");
  if (u == v) throw GraphError("self-loop on vertex " + std::to_string(u));
  auto& au = adj_[u];
  auto it = std::lower_bound(au.begin(), au.end(), v);
  if (it != au.end() && *it == v) return false;
  au.insert(it, v);
  auto& av = adj_[v];
  av.insert(std::lower_bound(av.begin(), av.end(), u), u);
  ++num_edges_;
  return true;
}

bool Graph::has_edge(Vertex u, Vertex v) const {
  const auto& au = adj_.at(u);
  return std::binary_search(au.begin(), au.end(), v);
}

int Graph::max_degree() const {
  int best = 0;
  for (const auto& a : adj_) best = std::max(best, static_cast<int>(a.size()));
  return best;
}

std::vector<std::pair<Vertex, Vertex>> Graph::edges() const {
  std::vector<std::pair<Vertex, Vertex>> out;
  out.reserve(num_edges_);
  for (int u = 0; u < num_vertices(); ++u)
    for (Vertex v : adj_[u])
      if (u < v) out.emplace_back(u, v);
  return out;
}

bool Graph::is_connected() const {
  const int m = num_vertices();
  if (m == 0) return false;
  std::vector<char> seen(m, 0);
  std::vector<Vertex> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const Vertex v = stack.back();
    stack.pop_back();
    for (Vertex w : adj_[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
    }
  }
  return count == m;
}

int DistanceMatrix::diameter() const {
  int best = 0;
  for (int d : d_) {
    if (d == kUnreachable) throw GraphError("graph is disconnected; diameter undefined");
    best = std::max(best, d);
  }
  return best;
}

DistanceMatrix bfs_distances(const Graph& g) {
  const int m = g.num_vertices();
  DistanceMatrix dist(m);
  std::vector<Vertex> queue(static_cast<std::size_t>(m));
  for (Vertex s = 0; s < m; ++s) {
    std::size_t head = 0, tail = 0;
    queue[tail++] = s;
    dist.at(s, s) = 0;
    while (head < tail) {
      const Vertex v = queue[head++];
      const int dv = dist(s, v);
      for (Vertex w : g.neighbors(v)) {
        if (dist(s, w) == DistanceMatrix::kUnreachable) {
          dist.at(s, w) = dv + 1;
          queue[tail++] = w;
        }
      }
    }
  }
  return dist;
}

Graph power_graph(const DistanceMatrix& dist, int gamma) {
  if (gamma < 0) throw GraphError("gamma must be nonnegative");
  const int m = dist.size();
  Graph out(m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const int d = dist(i, j);
      if (d != DistanceMatrix::kUnreachable && d <= gamma) out.add_edge(i, j);
    }
  return out;
}

Graph power_graph(const Graph& g, int gamma) { return power_graph(bfs_distances(g), gamma); }

CliqueCover greedy_clique_cover(const Graph& g) {
  const int m = g.num_vertices();
  CliqueCover cover;
  cover.clique_of.assign(m, -1);
  for (Vertex seed = 0; seed < m; ++seed) {
    if (cover.clique_of[seed] >= 0) continue;
    const int id = static_cast<int>(cover.blocks.size());
    std::vector<Vertex> block{seed};
    cover.clique_of[seed] = id;
    // Candidates must neighbour the seed; scanning its sorted adjacency keeps
    // the lowest-id order.
    for (Vertex w : g.neighbors(seed)) {
      if (cover.clique_of[w] >= 0) continue;
      const bool fits = std::all_of(block.begin(), block.end(),
                                    [&](Vertex b) { return g.has_edge(b, w); });
      if (fits) {
        block.push_back(w);
        cover.clique_of[w] = id;
      }
    }
    cover.blocks.push_back(std::move(block));
  }
  return cover;
}

std::vector<Vertex> greedy_mwis(const Graph& g, const std::vector<double>& weights) {
  const int m = g.num_vertices();
  if (static_cast<int>(weights.size()) != m)
    throw GraphError("weight vector length does not match vertex count");
  std::vector<Vertex> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Vertex a, Vertex b) { return weights[a] > weights[b]; });
  std::vector<char> removed(m, 0);
  std::vector<Vertex> chosen;
  for (Vertex v : order) {
    if (removed[v]) continue;
    chosen.push_back(v);
    removed[v] = 1;
    for (Vertex w : g.neighbors(v)) removed[w] = 1;
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

LeaderAssignment assign_leaders(const Graph& g_gamma) {
  const int m = g_gamma.num_vertices();
  std::vector<double> weights(m);
  for (int v = 0; v < m; ++v) weights[v] = g_gamma.degree(v);

  LeaderAssignment la;
  la.leaders = greedy_mwis(g_gamma, weights);
  la.leader_of.assign(m, -1);
  la.followers_of.assign(m, {});
  for (Vertex l : la.leaders) la.leader_of[l] = l;

  for (Vertex v = 0; v < m; ++v) {
    if (la.leader_of[v] == v) continue;
    Vertex best = -1;
    for (Vertex w : g_gamma.neighbors(v)) {  // ascending, so ties keep the lowest id
      if (la.leader_of[w] != w) continue;
      if (best < 0 || g_gamma.degree(w) > g_gamma.degree(best)) best = w;
    }
    if (best < 0)
      throw std::logic_error("vertex " + std::to_string(v) + " has no adjacent leader");
    la.leader_of[v] = best;
    la.followers_of[best].push_back(v);
  }
  return la;
}

ConsensusSpectrum consensus_spectrum(const Graph& g, double kappa) {
  if (!(kappa > 0.0 && kappa < 1.0)) throw GraphError("kappa must lie in (0, 1)");
  const int m = g.num_vertices();
  if (m == 0) throw GraphError("empty graph");
  if (!g.is_connected()) throw GraphError("consensus spectrum requires a connected graph");

  ConsensusSpectrum s;
  s.m = m;
  s.kappa = kappa;
  s.d_max = g.max_degree();

  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(m, m);
  if (s.d_max > 0) {
    const double scale = kappa / s.d_max;
    for (int i = 0; i < m; ++i) {
      p(i, i) -= scale * g.degree(i);
      for (Vertex j : g.neighbors(i)) p(i, j) += scale;
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(p);
  if (solver.info() != Eigen::Success) throw GraphError("eigendecomposition failed");
  // Eigen returns ascending order.
  const Eigen::VectorXd evals = solver.eigenvalues().reverse();
  const Eigen::MatrixXd evecs = solver.eigenvectors().rowwise().reverse();

  s.p.resize(static_cast<std::size_t>(m) * m);
  s.eigenvectors.resize(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      s.p[static_cast<std::size_t>(i) * m + j] = p(i, j);
      s.eigenvectors[static_cast<std::size_t>(i) * m + j] = evecs(i, j);
    }
  s.eigenvalues.assign(evals.data(), evals.data() + m);

  std::vector<double> lam_abs(m);
  for (int p_idx = 0; p_idx < m; ++p_idx) lam_abs[p_idx] = std::abs(s.eigenvalues[p_idx]);

  double eps = 0.0;
  for (int p_idx = 1; p_idx < m; ++p_idx) eps += lam_abs[p_idx] / (1.0 - lam_abs[p_idx]);
  s.epsilon = std::sqrt(static_cast<double>(m)) * eps;

  // omega^+_{pj} / omega^-_{pj}: sums of the positive / negative entries of
  // the elementwise product u_p .* u_j.
  s.epsilon_k.assign(m, 0.0);
  std::vector<double> prod(m);
  for (int p_idx = 0; p_idx < m; ++p_idx) {
    for (int j = 1; j < m; ++j) {
      const double lp = s.eigenvalues[p_idx] * s.eigenvalues[j];
      const double alp = std::abs(lp);
      if (alp >= 1.0 - 1e-12)
        throw GraphError("|lambda_p lambda_j| reached 1 for a pair with j >= 2");
      const double weight = alp / (1.0 - alp);
      double omega_pos = 0.0, omega_neg = 0.0;
      for (int d = 0; d < m; ++d) {
        prod[d] = evecs(d, p_idx) * evecs(d, j);
        if (prod[d] >= 0.0) omega_pos += prod[d];
        if (prod[d] <= 0.0) omega_neg += prod[d];
      }
      const double omega_abs = std::max(std::abs(omega_pos), std::abs(omega_neg));
      for (int k = 0; k < m; ++k) {
        const double ukk = prod[k];
        double a;
        if (lp >= 0.0) {
          a = ukk >= 0.0 ? omega_pos * ukk : omega_neg * ukk;
        } else {
          a = omega_abs * std::abs(ukk);
        }
        s.epsilon_k[k] += weight * a;
      }
    }
  }
  for (double& e : s.epsilon_k) e *= m;
  return s;
}

Graph generate_er(int m, double p, Rng& rng) {
  if (m < 2) throw GraphError("Erdos-Renyi needs at least 2 vertices");
  if (!(p > 0.0 && p <= 1.0)) throw GraphError("Erdos-Renyi edge probability must lie in (0, 1]");
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Graph g(m);
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        if (uniform_open01(rng) < p) g.add_edge(i, j);
    if (g.is_connected()) return g;
  }
  throw GraphError("Erdos-Renyi graph still disconnected after 1000 resamples");
}

Graph generate_ba(int m, int attach, Rng& rng) {
  if (attach < 1 || attach >= m) throw GraphError("Barabasi-Albert requires 1 <= attach < m");
  Graph g = Graph::complete(attach + 1);
  Graph out(m);
  for (const auto& [u, v] : g.edges()) out.add_edge(u, v);

  // One entry per edge endpoint, so uniform picks are degree-proportional.
  std::vector<Vertex> endpoints;
  for (const auto& [u, v] : out.edges()) {
    endpoints.push_back(u);
    endpoints.push_back(v);
  }
  std::vector<Vertex> targets;
  for (Vertex v = attach + 1; v < m; ++v) {
    targets.clear();
    while (static_cast<int>(targets.size()) < attach) {
      std::uniform_int_distribution<std::size_t> pick(0, endpoints.size() - 1);
      const Vertex t = endpoints[pick(rng)];
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    for (Vertex t : targets) {
      out.add_edge(v, t);
      endpoints.push_back(v);
      endpoints.push_back(t);
    }
  }
  return out;
}

Graph load_edge_list(std::string_view text) {
  std::unordered_map<long long, int> index;
  std::vector<std::pair<int, int>> edges;
  auto intern = [&](long long raw) {
    auto [it, inserted] = index.emplace(raw, static_cast<int>(index.size()));
    return it->second;
  };

  std::istringstream text_in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(text_in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;

    std::istringstream in(line);
    long long a = 0, b = 0;
    std::string extra;
    if (!(in >> a >> b) || (in >> extra))
      throw GraphError("malformed edge list line " + std::to_string(line_no) + ": '" + line + "'");
    const int u = intern(a);
    const int v = intern(b);
    if (u != v) edges.emplace_back(u, v);
  }
  return Graph(static_cast<int>(index.size()), edges);
}

Graph load_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open edge list '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return load_edge_list(buf.str());
}

Graph sample_connected_subgraph(const Graph& g, int n, Rng& rng) {
  const int m = g.num_vertices();
  if (n < 1 || n > m) throw GraphError("subgraph size must lie in [1, M]");
  std::uniform_int_distribution<int> pick(0, m - 1);
  const Vertex seed = pick(rng);

  std::vector<int> new_id(m, -1);
  std::vector<Vertex> order{seed};
  new_id[seed] = 0;
  for (std::size_t head = 0; head < order.size() && static_cast<int>(order.size()) < n; ++head) {
    for (Vertex w : g.neighbors(order[head])) {
      if (new_id[w] >= 0) continue;
      new_id[w] = static_cast<int>(order.size());
      order.push_back(w);
      if (static_cast<int>(order.size()) == n) break;
    }
  }
  if (static_cast<int>(order.size()) < n)
    throw GraphError("component of the seed vertex has only " + std::to_string(order.size()) +
                     " vertices; requested " + std::to_string(n));

  Graph out(n);
  for (Vertex v : order)
    for (Vertex w : g.neighbors(v))
      if (new_id[w] >= 0 && new_id[v] < new_id[w]) out.add_edge(new_id[v], new_id[w]);
  return out;
}

}  // namespace mpucb
