#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mpucb/rng.hpp"

namespace mpucb {

using Vertex = int;

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Undirected simple graph on vertices 0..M-1 with sorted adjacency lists.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int num_vertices);
  Graph(int num_vertices, const std::vector<std::pair<Vertex, Vertex>>& edges);

  static Graph complete(int m);
  static Graph path(int m);
  static Graph star(int leaves);
  static Graph cycle(int m);

  int num_vertices() const { return static_cast<int>(adj_.size()); }
  std::size_t num_edges() const { return num_edges_; }

  // Inserts {u, v}. Self-loops are rejected; duplicates are ignored.
  // Returns true if the edge was new.
  bool add_edge(Vertex u, Vertex v);
  bool has_edge(Vertex u, Vertex v) const;

  const std::vector<Vertex>& neighbors(Vertex v) const { return adj_.at(v); }
  int degree(Vertex v) const { return static_cast<int>(adj_.at(v).size()); }
  int max_degree() const;

  // Edges as (u, v) with u < v, in lexicographic order.
  std::vector<std::pair<Vertex, Vertex>> edges() const;

  bool is_connected() const;

  friend bool operator==(const Graph& a, const Graph& b) { return a.adj_ == b.adj_; }

 private:
  std::vector<std::vector<Vertex>> adj_;
  std::size_t num_edges_ = 0;
};

// All-pairs hop counts. Unreachable pairs hold kUnreachable.
class DistanceMatrix {
 public:
  static constexpr int kUnreachable = std::numeric_limits<int>::max();

  DistanceMatrix() = default;
  explicit DistanceMatrix(int m) : m_(m), d_(static_cast<std::size_t>(m) * m, kUnreachable) {}

  int size() const { return m_; }
  int operator()(Vertex u, Vertex v) const { return d_[static_cast<std::size_t>(u) * m_ + v]; }
  int& at(Vertex u, Vertex v) { return d_[static_cast<std::size_t>(u) * m_ + v]; }

  // Largest finite distance; throws if any pair is unreachable.
  int diameter() const;

  friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

 private:
  int m_ = 0;
  std::vector<int> d_;
};

DistanceMatrix bfs_distances(const Graph& g);

// Edge (i, j) iff 1 <= d(i, j) <= gamma.
Graph power_graph(const Graph& g, int gamma);
Graph power_graph(const DistanceMatrix& dist, int gamma);

struct CliqueCover {
  std::vector<std::vector<Vertex>> blocks;
  std::vector<int> clique_of;

  std::size_t num_blocks() const { return blocks.size(); }
  bool same_block(Vertex a, Vertex b) const { return clique_of[a] == clique_of[b]; }
};

// Lowest-id seeding with greedy absorption of lowest-id compatible vertices.
CliqueCover greedy_clique_cover(const Graph& g);

// Repeatedly takes the heaviest remaining vertex (ties to lowest id) and
// discards its neighbours. Result is sorted ascending.
std::vector<Vertex> greedy_mwis(const Graph& g, const std::vector<double>& weights);

struct LeaderAssignment {
  std::vector<Vertex> leaders;
  std::vector<Vertex> leader_of;
  std::vector<std::vector<Vertex>> followers_of;  // indexed by vertex; empty for non-leaders

  bool is_leader(Vertex v) const { return leader_of[v] == v; }
};

// Leaders form a greedy MWIS of g_gamma weighted by g_gamma degree. Each
// follower attaches to its adjacent leader of largest degree (ties to the
// lowest id).
LeaderAssignment assign_leaders(const Graph& g_gamma);

// Consensus matrix P = I - (kappa / d_max) L with its eigensystem and the
// count-estimate constants used by the consensus baseline.
struct ConsensusSpectrum {
  int m = 0;
  double kappa = 0.0;
  int d_max = 0;
  std::vector<double> p;            // row-major m x m
  std::vector<double> eigenvalues;  // descending
  std::vector<double> eigenvectors; // column j (row-major m x m) is u_{j+1}
  double epsilon = 0.0;
  std::vector<double> epsilon_k;    // per agent

  double p_at(int i, int j) const { return p[static_cast<std::size_t>(i) * m + j]; }
  double u(int vec, int comp) const {
    return eigenvectors[static_cast<std::size_t>(comp) * m + vec];
  }
};

ConsensusSpectrum consensus_spectrum(const Graph& g, double kappa);

// Erdos-Renyi G(m, p), resampled until connected (at most 1000 attempts).
Graph generate_er(int m, double p, Rng& rng);

// Barabasi-Albert preferential attachment seeded by a clique on attach+1
// vertices.
Graph generate_ba(int m, int attach, Rng& rng);

// Whitespace-separated "u v" pairs, '#' comment lines, ids re-indexed in
// order of first appearance.
Graph load_edge_list(std::string_view text);
Graph load_edge_list_file(const std::string& path);

// BFS from a uniformly random seed until n vertices are collected; returns
// the induced subgraph re-indexed in BFS order.
Graph sample_connected_subgraph(const Graph& g, int n, Rng& rng);

}  // namespace mpucb
