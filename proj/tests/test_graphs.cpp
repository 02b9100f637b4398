#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "nugget/errors.hpp"
#include "nugget/graphs.hpp"

using namespace nugget;
using namespace nugget::testing;

namespace {

bool is_valid_simple_graph(const Graph& g) {
  const Matrix& w = g.weights();
  for (std::size_t i = 0; i < g.n(); ++i) {
    if (w(i, i) != 0.0) return false;
    for (std::size_t j = 0; j < g.n(); ++j)
      if (w(i, j) != w(j, i) || w(i, j) < 0.0) return false;
  }
  return g.connected();
}

std::size_t max_degree(const Graph& g) {
  const auto d = g.degrees();
  return *std::max_element(d.begin(), d.end());
}

bool is_acyclic_connected(const Graph& g) { return g.connected() && g.edge_count() == g.n() - 1; }

}  // namespace

TEST_CASE("graph construction validates weights") {
  CHECK_THROWS_AS(Graph(Matrix(2, 2, {0, 1, 2, 0})), ArgumentError);
  CHECK_THROWS_AS(Graph(Matrix(2, 2, {1, 1, 1, 0})), ArgumentError);
  CHECK_THROWS_AS(Graph(Matrix(2, 2, {0, -1, -1, 0})), ArgumentError);
  const Graph g = Graph::from_edges(3, {{0, 1}});
  CHECK(g.edge_count() == 1);
  CHECK_FALSE(g.connected());
}

TEST_CASE("erdos-renyi") {
  Rng rng(1);
  SUBCASE("p = 1 gives the complete graph") { CHECK(gen_er(20, 1.0, rng).edge_count() == 190); }
  SUBCASE("mean edge count at p = 0.2") {
    double total = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const Graph g = gen_er(20, 0.2, rng);
      REQUIRE(is_valid_simple_graph(g));
      total += static_cast<double>(g.edge_count());
    }
    // conditioning on connectivity shifts the mean up slightly
    CHECK(total / 1000.0 == doctest::Approx(38.0).epsilon(0.05));
  }
  SUBCASE("determinism") {
    Rng a(99), b(99);
    CHECK(gen_er(20, 0.2, a).weights() == gen_er(20, 0.2, b).weights());
  }
  SUBCASE("hopeless connectivity raises") { CHECK_THROWS_AS(gen_er(50, 0.001, rng), GenerationError); }
  SUBCASE("bad parameters") {
    CHECK_THROWS_AS(gen_er(1, 0.5, rng), ArgumentError);
    CHECK_THROWS_AS(gen_er(5, 0.0, rng), ArgumentError);
  }
}

TEST_CASE("watts-strogatz") {
  Rng rng(2);
  SUBCASE("no rewiring is a ring lattice") {
    const Graph g = gen_ws(20, 4, 0.0, rng);
    for (std::size_t d : g.degrees()) CHECK(d == 4);
    CHECK(g.has_edge(0, 19));
    CHECK(g.has_edge(0, 18));
    CHECK_FALSE(g.has_edge(0, 3));
  }
  SUBCASE("rewiring preserves the edge count") {
    for (int i = 0; i < 200; ++i) {
      const Graph g = gen_ws(20, 4, 0.2, rng);
      REQUIRE(is_valid_simple_graph(g));
      CHECK(g.edge_count() == 40);
    }
  }
  SUBCASE("degree defaults round log2 n to an even number") {
    CHECK(default_ws_degree(20) == 4);
    CHECK(default_ws_degree(4) == 2);
    CHECK(default_ws_degree(2) == 2);
    CHECK(default_ws_degree(100) == 6);
    CHECK(default_ws_degree(1000) == 10);
  }
  SUBCASE("k >= n or odd k rejected") {
    CHECK_THROWS_AS(gen_ws(4, 4, 0.1, rng), ArgumentError);
    CHECK_THROWS_AS(gen_ws(10, 3, 0.1, rng), ArgumentError);
  }
}

TEST_CASE("barabasi-albert") {
  Rng rng(3);
  SUBCASE("m = 1 gives trees") {
    for (int i = 0; i < 200; ++i) {
      const Graph g = gen_ba(20, 1, rng);
      REQUIRE(is_valid_simple_graph(g));
      CHECK(g.edge_count() == 19);
      CHECK(is_acyclic_connected(g));
    }
  }
  SUBCASE("two nodes") {
    const Graph g = gen_ba(2, 1, rng);
    CHECK(g.edge_count() == 1);
  }
  SUBCASE("m = 2 edge count") {
    const Graph g = gen_ba(20, 2, rng);
    CHECK(is_valid_simple_graph(g));
    CHECK(g.edge_count() == 2 + 2 * 17);
  }
  SUBCASE("hubs are larger than in erdos-renyi") {
    double ba = 0.0, er = 0.0;
    for (int i = 0; i < 1000; ++i) {
      ba += static_cast<double>(max_degree(gen_ba(20, 1, rng)));
      er += static_cast<double>(max_degree(gen_er(20, 0.2, rng)));
    }
    CHECK(ba > er);
  }
  SUBCASE("m >= n rejected") { CHECK_THROWS_AS(gen_ba(3, 3, rng), ArgumentError); }
}

TEST_CASE("generate_graph dispatch and model names") {
  CHECK(parse_graph_model("er") == GraphModel::ErdosRenyi);
  CHECK(parse_graph_model("ws") == GraphModel::WattsStrogatz);
  CHECK(parse_graph_model("ba") == GraphModel::BarabasiAlbert);
  CHECK_THROWS_AS(parse_graph_model("xx"), ConfigError);
  Rng rng(4);
  const Graph g = generate_graph({GraphModel::WattsStrogatz, 20, 0.2, 0, 1}, rng);
  CHECK(g.edge_count() == 40);
}

TEST_CASE("normalize") {
  SUBCASE("two-node path") {
    const NormalizedGraph ng = normalize(path(2));
    CHECK(ng.adjacency == Matrix(2, 2, {0, 1, 1, 0}));
  }
  SUBCASE("triangle") {
    const NormalizedGraph ng = normalize(Graph::from_edges(3, {{0, 1}, {1, 2}, {0, 2}}));
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) CHECK(ng.adjacency(i, j) == doctest::Approx(i == j ? 0.0 : 0.5));
  }
  SUBCASE("isolated node rejected") { CHECK_THROWS_AS(normalize(Graph::from_edges(3, {{0, 1}})), ArgumentError); }
  SUBCASE("spectrum and nullspace on random graphs") {
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
      const Graph g = generate_graph({static_cast<GraphModel>(i % 3), 20, 0.2, 4, 1}, rng);
      const NormalizedGraph ng = normalize(g);
      CHECK(ng.eig.values.front() == doctest::Approx(1.0).epsilon(1e-8));
      CHECK(ng.eig.values.back() >= -1.0 - 1e-8);
      CHECK((ng.adjacency + ng.laplacian - Matrix::identity(20)).max_abs() == 0.0);
      const Vector lv = ng.laplacian * ng.sqrt_degree;
      CHECK(norm_inf(lv) < 1e-12);
      // top eigenvector is parallel to D^1/2 1
      const Vector u1 = ng.eig.eigenvector(0);
      CHECK(std::abs(dot(u1, ng.sqrt_degree)) == doctest::Approx(norm2(ng.sqrt_degree)).epsilon(1e-8));
    }
  }
  SUBCASE("frozen spectrum of the hexagon with a chord") {
    const NormalizedGraph ng = normalize(hexagon_with_chord());
    const double expected[] = {1.0, 0.5, 1.0 / 6.0, -1.0 / 6.0, -0.5, -1.0};
    for (std::size_t i = 0; i < 6; ++i) CHECK(ng.eig.values[i] == doctest::Approx(expected[i]).epsilon(1e-12));
  }
  SUBCASE("relabelling commutes with normalization") {
    Rng rng(6);
    for (int i = 0; i < 20; ++i) {
      const Graph g = gen_er(20, 0.2, rng);
      const auto perm = random_permutation(20, rng);
      const NormalizedGraph a = normalize(g.permuted(perm));
      const NormalizedGraph b = normalize(g);
      CHECK(max_abs_diff(a.adjacency, permute_sym(b.adjacency, perm)) == 0.0);
    }
  }
}
