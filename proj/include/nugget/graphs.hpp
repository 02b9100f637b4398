#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "nugget/linalg.hpp"
#include "nugget/rng.hpp"

namespace nugget {

/// Undirected weighted graph: symmetric non-negative weights, zero diagonal.
class Graph {
 public:
  explicit Graph(Matrix weights);
  static Graph from_edges(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges);

  std::size_t n() const noexcept { return weights_.rows(); }
  const Matrix& weights() const noexcept { return weights_; }
  bool has_edge(std::size_t i, std::size_t j) const { return weights_(i, j) > 0.0; }
  std::size_t edge_count() const;
  std::vector<std::size_t> degrees() const;
  bool connected() const;
  // Binary 0/1 adjacency (weights > 0).
  Matrix binary_adjacency() const;
  // Relabel: node i of the result is node perm[i] of this graph.
  Graph permuted(std::span<const std::size_t> perm) const;

 private:
  Matrix weights_;
};

/// A = D^-1/2 W D^-1/2 and L = I - A with the eigendecomposition of A cached.
struct NormalizedGraph {
  Matrix adjacency;
  Matrix laplacian;
  EigenDecomposition eig;
  Vector sqrt_degree;  // D^1/2 1, spans the nullspace of L

  std::size_t n() const noexcept { return adjacency.rows(); }
};

NormalizedGraph normalize(const Graph& g);

enum class GraphModel { ErdosRenyi, WattsStrogatz, BarabasiAlbert };

std::string_view to_string(GraphModel m);
GraphModel parse_graph_model(std::string_view s);

/// Generator parameters. `p` is the edge (ER) or rewiring (WS) probability,
/// `k` the WS lattice degree (0 selects the default: log2(n) rounded to the
/// nearest even integer, minimum 2) and `m` the BA attachment count.
struct GraphSpec {
  GraphModel model = GraphModel::BarabasiAlbert;
  std::size_t n = 20;
  double p = 0.2;
  std::size_t k = 0;
  std::size_t m = 1;
};

inline constexpr int kMaxConnectAttempts = 1000;

Graph gen_er(std::size_t n, double p, Rng& rng);
Graph gen_ws(std::size_t n, std::size_t k, double p, Rng& rng);
Graph gen_ba(std::size_t n, std::size_t m, Rng& rng);
Graph generate_graph(const GraphSpec& spec, Rng& rng);

std::size_t default_ws_degree(std::size_t n);

}  // namespace nugget
