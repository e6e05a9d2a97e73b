#include <catch2/catch.hpp>

#include <Eigen/SVD>
#include <algorithm>
#include <set>

#include "admmtrack/graph.hpp"

using namespace admmtrack;

namespace {

Graph path_graph(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return detail::make_graph(n, edges);
}

Graph complete_graph(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  return detail::make_graph(n, edges);
}

}  // namespace

TEST_CASE("random graphs are connected and deterministic") {
  for (std::uint64_t seed : {1ull, 7ull, 42ull, 2026ull}) {
    const Graph g = generate_random_graph(10, 0.5, seed);
    REQUIRE(g.n_nodes == 10);
    REQUIRE(is_connected(g));
    const Graph g2 = generate_random_graph(10, 0.5, seed);
    REQUIRE(g.edges == g2.edges);
  }
}

TEST_CASE("probability-one sampling gives complete graphs") {
  const Graph k2 = generate_random_graph(2, 1.0, 3);
  REQUIRE(k2.n_undirected_edges() == 1);
  REQUIRE(k2.has_edge(0, 1));

  const Graph k4 = generate_random_graph(4, 1.0, 99);
  REQUIRE(k4.n_undirected_edges() == 6);
}

TEST_CASE("unreachable connectivity fails after the attempt cap") {
  REQUIRE_THROWS_AS(generate_random_graph(20, 1e-6, 1, 50), NumericalError);
}

TEST_CASE("input validation on graph generation") {
  REQUIRE_THROWS_AS(generate_random_graph(1, 0.5, 1), ConfigError);
  REQUIRE_THROWS_AS(generate_random_graph(5, 0.0, 1), ConfigError);
  REQUIRE_THROWS_AS(generate_random_graph(5, 1.5, 1), ConfigError);
}

TEST_CASE("path graph P3 spectrum") {
  // Characteristic polynomial of the P3 Laplacian factors as l(l-1)(l-3).
  const Graph p3 = path_graph(3);
  const GraphSpectrum s = laplacian_spectrum(p3, GammaConvention::kSecondLargest);
  REQUIRE(s.eigenvalues(0) == Approx(0.0).margin(1e-10));
  REQUIRE(s.eigenvalues(1) == Approx(1.0).margin(1e-10));
  REQUIRE(s.eigenvalues(2) == Approx(3.0).margin(1e-10));
  REQUIRE(s.Gamma_L == Approx(3.0));
  REQUIRE(s.gamma_L == Approx(1.0));
  const GraphSpectrum s2 = laplacian_spectrum(p3, GammaConvention::kSmallestNonzero);
  REQUIRE(s2.gamma_L == Approx(1.0));
}

TEST_CASE("K2 spectrum under either convention") {
  const Graph k2 = complete_graph(2);
  for (auto conv : {GammaConvention::kSecondLargest, GammaConvention::kSmallestNonzero}) {
    const GraphSpectrum s = laplacian_spectrum(k2, conv);
    REQUIRE(s.eigenvalues(0) == Approx(0.0).margin(1e-10));
    REQUIRE(s.eigenvalues(1) == Approx(2.0).margin(1e-10));
    REQUIRE(s.Gamma_L == Approx(2.0));
    REQUIRE(s.gamma_L == Approx(2.0));
  }
}

TEST_CASE("K4 spectrum has n with multiplicity n-1") {
  const Graph k4 = complete_graph(4);
  const GraphSpectrum s = laplacian_spectrum(k4, GammaConvention::kSecondLargest);
  REQUIRE(s.eigenvalues(0) == Approx(0.0).margin(1e-10));
  for (int i = 1; i < 4; ++i) REQUIRE(s.eigenvalues(i) == Approx(4.0).margin(1e-9));
  REQUIRE(s.Gamma_L == Approx(4.0));
  REQUIRE(s.gamma_L == Approx(4.0));
}

TEST_CASE("spectrum invariant under node relabeling") {
  const Graph g = generate_random_graph(8, 0.4, 11);
  // fixed permutation (reversal)
  std::vector<std::pair<int, int>> relabeled;
  for (auto [i, j] : g.edges) relabeled.emplace_back(7 - i, 7 - j);
  const Graph h = detail::make_graph(8, relabeled);
  const auto sg = laplacian_spectrum(g).eigenvalues;
  const auto sh = laplacian_spectrum(h).eigenvalues;
  for (int i = 0; i < 8; ++i) REQUIRE(sg(i) == Approx(sh(i)).margin(1e-9));
}

TEST_CASE("arc matrices on K2 with p = 1") {
  const Graph k2 = complete_graph(2);
  const ArcMatrices a = arc_matrices(k2, 1);
  REQUIRE(a.m_arcs == 2);
  REQUIRE(a.arcs[0] == std::make_pair(0, 1));
  REQUIRE(a.arcs[1] == std::make_pair(1, 0));
  Eigen::MatrixXd As(2, 2), Ad(2, 2), Eo(2, 2);
  As << 1, 0, 0, 1;
  Ad << 0, 1, 1, 0;
  Eo << 1, -1, -1, 1;
  REQUIRE((a.A_s - As).norm() == 0.0);
  REQUIRE((a.A_d - Ad).norm() == 0.0);
  REQUIRE((a.E_o - Eo).norm() == 0.0);
  // B = [-I; -I]
  REQUIRE(a.B.rows() == 4);
  REQUIRE(a.B.cols() == 2);
  REQUIRE((a.B.topRows(2) + Eigen::MatrixXd::Identity(2, 2)).norm() == 0.0);
  REQUIRE((a.B.bottomRows(2) + Eigen::MatrixXd::Identity(2, 2)).norm() == 0.0);
}

TEST_CASE("arc matrices shapes on P3 with p = 2") {
  const Graph p3 = path_graph(3);
  const ArcMatrices a = arc_matrices(p3, 2);
  REQUIRE(a.m_arcs == 4);
  REQUIRE(a.A_s.rows() == 8);
  REQUIRE(a.A_s.cols() == 6);
  REQUIRE(a.B.rows() == 16);
  REQUIRE(a.B.cols() == 8);
}

TEST_CASE("each block row of A_s and A_d selects exactly one node") {
  const Graph g = generate_random_graph(6, 0.6, 5);
  const int p = 2;
  const ArcMatrices a = arc_matrices(g, p);
  for (int e = 0; e < a.m_arcs; ++e) {
    const auto [src, dst] = a.arcs[e];
    for (int other = 0; other < g.n_nodes; ++other) {
      const Eigen::MatrixXd bs = a.A_s.block(e * p, other * p, p, p);
      const Eigen::MatrixXd bd = a.A_d.block(e * p, other * p, p, p);
      Eigen::MatrixXd expect_s = Eigen::MatrixXd::Zero(p, p);
      if (other == src) expect_s.setIdentity();
      Eigen::MatrixXd expect_d = Eigen::MatrixXd::Zero(p, p);
      if (other == dst) expect_d.setIdentity();
      REQUIRE((bs - expect_s).norm() == 0.0);
      REQUIRE((bd - expect_d).norm() == 0.0);
    }
  }
}

TEST_CASE("consensus vectors lie in the null space of E_o") {
  rng::Stream s(7, rng::kDomainTest, 0);
  const Graph g = generate_random_graph(7, 0.5, 13);
  const int p = 3;
  const ArcMatrices a = arc_matrices(g, p);
  Eigen::VectorXd v(p);
  for (int c = 0; c < p; ++c) v(c) = s.gaussian();
  Eigen::VectorXd x(a.x_dim());
  for (int i = 0; i < g.n_nodes; ++i) x.segment(i * p, p) = v;
  REQUIRE((a.E_o * x).norm() < 1e-12);
  const Eigen::VectorXd replicated_s = a.A_s * x;
  const Eigen::VectorXd replicated_d = a.A_d * x;
  REQUIRE((replicated_s - replicated_d).norm() < 1e-12);
  for (int e = 0; e < a.m_arcs; ++e)
    REQUIRE((replicated_s.segment(e * p, p) - v).norm() < 1e-12);
}

TEST_CASE("E_o has exactly p zero singular values on connected graphs") {
  for (int n : {2, 3, 4, 5, 6}) {
    const Graph g = n <= 3 ? path_graph(n) : generate_random_graph(n, 0.7, n);
    const int p = 2;
    const ArcMatrices a = arc_matrices(g, p);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a.E_o);
    const auto& sv = svd.singularValues();
    int zeros = 0;
    for (int i = 0; i < sv.size(); ++i)
      if (sv(i) < 1e-10 * sv(0)) ++zeros;
    // rank (n-1)p; the singular value list has x_dim = n p entries
    REQUIRE(zeros == p);
  }
}

TEST_CASE("edge list round trip") {
  const Graph g = generate_random_graph(9, 0.4, 17);
  const Graph h = parse_edge_list(to_edge_list(g));
  REQUIRE(h.n_nodes == g.n_nodes);
  REQUIRE(h.edges == g.edges);
}

TEST_CASE("edge list parse rejects malformed input") {
  REQUIRE_THROWS_AS(parse_edge_list(""), ConfigError);
  REQUIRE_THROWS_AS(parse_edge_list("3 2\n0 1\n"), ConfigError);
  REQUIRE_THROWS_AS(parse_edge_list("3 1\n0 3\n"), ConfigError);
}
