#ifndef ADMMTRACK_GRAPH_HPP_
#define ADMMTRACK_GRAPH_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "admmtrack/errors.hpp"
#include "admmtrack/rng.hpp"

namespace admmtrack {

// Undirected simple connected network. Edges are stored sorted with i < j.
struct Graph {
  int n_nodes = 0;
  std::vector<std::pair<int, int>> edges;       // sorted lexicographically
  std::vector<std::vector<int>> neighbors;      // sorted adjacency lists
  std::vector<int> degree;

  int n_undirected_edges() const { return static_cast<int>(edges.size()); }

  bool has_edge(int i, int j) const {
    if (i == j) return false;
    const auto& ni = neighbors[i];
    return std::binary_search(ni.begin(), ni.end(), j);
  }
};

namespace detail {

inline Graph make_graph(int n_nodes, std::vector<std::pair<int, int>> edges) {
  Graph g;
  g.n_nodes = n_nodes;
  for (auto& e : edges)
    if (e.first > e.second) std::swap(e.first, e.second);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  g.edges = std::move(edges);
  g.neighbors.assign(n_nodes, {});
  for (auto [i, j] : g.edges) {
    g.neighbors[i].push_back(j);
    g.neighbors[j].push_back(i);
  }
  for (auto& nl : g.neighbors) std::sort(nl.begin(), nl.end());
  g.degree.resize(n_nodes);
  for (int i = 0; i < n_nodes; ++i)
    g.degree[i] = static_cast<int>(g.neighbors[i].size());
  return g;
}

}  // namespace detail

// Depth-first reachability from node 0.
inline bool is_connected(const Graph& g) {
  if (g.n_nodes <= 0) return false;
  std::vector<char> seen(g.n_nodes, 0);
  std::vector<int> stack = {0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : g.neighbors[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
    }
  }
  return count == g.n_nodes;
}

// Erdos-Renyi sampling conditioned on connectivity by rejection: each attempt
// uses a fresh sub-stream, so the result is deterministic in `seed`.
inline Graph generate_random_graph(int n_nodes, double edge_prob,
                                   std::uint64_t seed,
                                   int max_attempts = 10000) {
  if (n_nodes < 2) throw ConfigError("generate_random_graph: n_nodes must be >= 2");
  if (!(edge_prob > 0.0) || edge_prob > 1.0)
    throw ConfigError("generate_random_graph: edge_prob must be in (0, 1]");
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    rng::Stream stream(seed, rng::kDomainGraph, static_cast<std::uint64_t>(attempt));
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n_nodes; ++i)
      for (int j = i + 1; j < n_nodes; ++j)
        if (stream.uniform01() <= edge_prob) edges.emplace_back(i, j);
    Graph g = detail::make_graph(n_nodes, std::move(edges));
    if (is_connected(g)) return g;
  }
  throw NumericalError("generate_random_graph: connectivity unreachable after " +
                       std::to_string(max_attempts) + " rejections");
}

inline Eigen::MatrixXd laplacian(const Graph& g) {
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(g.n_nodes, g.n_nodes);
  for (auto [i, j] : g.edges) {
    L(i, i) += 1.0;
    L(j, j) += 1.0;
    L(i, j) -= 1.0;
    L(j, i) -= 1.0;
  }
  return L;
}

enum class GammaConvention { kSecondLargest, kSmallestNonzero };

inline const char* to_string(GammaConvention c) {
  return c == GammaConvention::kSecondLargest ? "second_largest"
                                              : "smallest_nonzero";
}

// Laplacian eigenvalues (ascending) plus the two constants used downstream.
// Under kSecondLargest, gamma_L is the second largest eigenvalue counted with
// multiplicity; for n = 2 that entry is the zero eigenvalue, in which case the
// smallest nonzero one is used so that gamma_L > 0 holds on connected graphs.
struct GraphSpectrum {
  Eigen::VectorXd eigenvalues;  // sorted ascending, first ~ 0
  double gamma_L = 0.0;
  double Gamma_L = 0.0;
  GammaConvention convention = GammaConvention::kSecondLargest;
};

inline GraphSpectrum laplacian_spectrum(
    const Graph& g, GammaConvention convention = GammaConvention::kSecondLargest) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(laplacian(g));
  GraphSpectrum s;
  s.eigenvalues = es.eigenvalues();
  s.convention = convention;
  const int n = g.n_nodes;
  s.Gamma_L = s.eigenvalues(n - 1);
  const double zero_tol = 1e-10 * std::max(1.0, s.Gamma_L);
  double smallest_nonzero = s.Gamma_L;
  for (int i = 0; i < n; ++i) {
    if (s.eigenvalues(i) > zero_tol) {
      smallest_nonzero = s.eigenvalues(i);
      break;
    }
  }
  if (convention == GammaConvention::kSmallestNonzero) {
    s.gamma_L = smallest_nonzero;
  } else {
    const double second_largest = s.eigenvalues(n - 2);
    s.gamma_L = second_largest > zero_tol ? second_largest : smallest_nonzero;
  }
  return s;
}

// Block arc matrices of the stacked consensus constraint
//   A_s x = z,  A_d x = z   i.e.  A x + B z = 0 with A = [A_s; A_d],
//   B = [-I; -I].
// Every undirected edge {i, j} (i < j) yields the arc pair (i->j), (j->i), in
// that order, edges ordered lexicographically. E_o = A_s - A_d.
struct ArcMatrices {
  int n_nodes = 0;
  int m_arcs = 0;
  int p = 0;
  std::vector<std::pair<int, int>> arcs;  // (source, destination)
  std::vector<int> degree;                // node degrees
  std::vector<std::vector<int>> arcs_at;  // arcs incident to a node (src or dst)
  Eigen::MatrixXd A_s, A_d, B, E_o;

  int x_dim() const { return n_nodes * p; }
  int z_dim() const { return m_arcs * p; }
};

inline ArcMatrices arc_matrices(const Graph& g, int p) {
  if (p < 1) throw ConfigError("arc_matrices: p must be >= 1");
  ArcMatrices a;
  a.n_nodes = g.n_nodes;
  a.p = p;
  a.degree = g.degree;
  for (auto [i, j] : g.edges) {
    a.arcs.emplace_back(i, j);
    a.arcs.emplace_back(j, i);
  }
  a.m_arcs = static_cast<int>(a.arcs.size());
  a.arcs_at.assign(g.n_nodes, {});
  for (int e = 0; e < a.m_arcs; ++e) {
    a.arcs_at[a.arcs[e].first].push_back(e);
    a.arcs_at[a.arcs[e].second].push_back(e);
  }
  const int zd = a.m_arcs * p;
  const int xd = g.n_nodes * p;
  a.A_s = Eigen::MatrixXd::Zero(zd, xd);
  a.A_d = Eigen::MatrixXd::Zero(zd, xd);
  for (int e = 0; e < a.m_arcs; ++e) {
    const auto [src, dst] = a.arcs[e];
    a.A_s.block(e * p, src * p, p, p).setIdentity();
    a.A_d.block(e * p, dst * p, p, p).setIdentity();
  }
  a.B = Eigen::MatrixXd::Zero(2 * zd, zd);
  a.B.topRows(zd) = -Eigen::MatrixXd::Identity(zd, zd);
  a.B.bottomRows(zd) = -Eigen::MatrixXd::Identity(zd, zd);
  a.E_o = a.A_s - a.A_d;
  return a;
}

// Edge-list text format: first line "n m", then one "i j" line per undirected
// edge, 0-indexed.
inline std::string to_edge_list(const Graph& g) {
  std::ostringstream os;
  os << g.n_nodes << ' ' << g.n_undirected_edges() << '\n';
  for (auto [i, j] : g.edges) os << i << ' ' << j << '\n';
  return os.str();
}

inline Graph parse_edge_list(const std::string& text) {
  std::istringstream is(text);
  int n = 0, m = 0;
  if (!(is >> n >> m)) throw ConfigError("parse_edge_list: bad header line");
  std::vector<std::pair<int, int>> edges;
  for (int t = 0; t < m; ++t) {
    int i = 0, j = 0;
    if (!(is >> i >> j))
      throw ConfigError("parse_edge_list: expected " + std::to_string(m) +
                        " edges, got " + std::to_string(t));
    if (i < 0 || j < 0 || i >= n || j >= n || i == j)
      throw ConfigError("parse_edge_list: invalid edge " + std::to_string(i) +
                        " " + std::to_string(j));
    edges.emplace_back(i, j);
  }
  return detail::make_graph(n, std::move(edges));
}

}  // namespace admmtrack

#endif  // ADMMTRACK_GRAPH_HPP_
