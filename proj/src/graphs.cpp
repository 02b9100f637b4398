#include "nugget/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

#include "nugget/errors.hpp"

namespace nugget {

Graph::Graph(Matrix weights) : weights_(std::move(weights)) {
  if (!weights_.square()) throw ArgumentError("Graph: weight matrix is not square");
  const std::size_t n = weights_.rows();
  for (std::size_t i = 0; i < n; ++i) {
    if (weights_(i, i) != 0.0) throw ArgumentError("Graph: non-zero diagonal (self-loop)");
    for (std::size_t j = 0; j < n; ++j) {
      const double w = weights_(i, j);
      if (!(w >= 0.0) || !std::isfinite(w)) throw ArgumentError("Graph: weights must be finite and non-negative");
      if (w != weights_(j, i)) throw ArgumentError("Graph: weight matrix is not symmetric");
    }
  }
}

Graph Graph::from_edges(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  Matrix w(n, n);
  for (auto [i, j] : edges) {
    if (i >= n || j >= n || i == j) throw ArgumentError("Graph::from_edges: invalid edge");
    w(i, j) = w(j, i) = 1.0;
  }
  return Graph(std::move(w));
}

std::size_t Graph::edge_count() const {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n(); ++i)
    for (std::size_t j = i + 1; j < n(); ++j) count += has_edge(i, j) ? 1 : 0;
  return count;
}

std::vector<std::size_t> Graph::degrees() const {
  std::vector<std::size_t> d(n(), 0);
  for (std::size_t i = 0; i < n(); ++i)
    for (std::size_t j = 0; j < n(); ++j) d[i] += has_edge(i, j) ? 1 : 0;
  return d;
}

bool Graph::connected() const {
  const std::size_t nn = n();
  if (nn == 0) return true;
  std::vector<bool> seen(nn, false);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = true;
  std::size_t visited = 1;
  while (!frontier.empty()) {
    const std::size_t u = frontier.front();
    frontier.pop();
    for (std::size_t v = 0; v < nn; ++v) {
      if (!seen[v] && has_edge(u, v)) {
        seen[v] = true;
        ++visited;
        frontier.push(v);
      }
    }
  }
  return visited == nn;
}

Matrix Graph::binary_adjacency() const {
  Matrix a(n(), n());
  for (std::size_t i = 0; i < a.size(); ++i) a.values()[i] = weights_.values()[i] > 0.0 ? 1.0 : 0.0;
  return a;
}

Graph Graph::permuted(std::span<const std::size_t> perm) const {
  if (perm.size() != n()) throw ArgumentError("Graph::permuted: permutation has wrong length");
  Matrix w(n(), n());
  for (std::size_t i = 0; i < n(); ++i)
    for (std::size_t j = 0; j < n(); ++j) w(i, j) = weights_(perm[i], perm[j]);
  return Graph(std::move(w));
}

NormalizedGraph normalize(const Graph& g) {
  const std::size_t n = g.n();
  NormalizedGraph out;
  out.sqrt_degree.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double d = 0.0;
    for (double w : g.weights().row(i)) d += w;
    if (d <= 0.0) throw ArgumentError("normalize: node " + std::to_string(i) + " has zero degree");
    out.sqrt_degree[i] = std::sqrt(d);
  }
  out.adjacency = Matrix(n, n);
  out.laplacian = Matrix::identity(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double w = g.weights()(i, j);
      if (w == 0.0) continue;
      // same expression for (i, j) and (j, i) keeps A exactly symmetric
      const double a = w / (out.sqrt_degree[std::min(i, j)] * out.sqrt_degree[std::max(i, j)]);
      out.adjacency(i, j) = a;
      out.laplacian(i, j) = -a;
    }
  }
  out.eig = sym_eig(out.adjacency);
  return out;
}

std::string_view to_string(GraphModel m) {
  switch (m) {
    case GraphModel::ErdosRenyi: return "er";
    case GraphModel::WattsStrogatz: return "ws";
    case GraphModel::BarabasiAlbert: return "ba";
  }
  return "?";
}

GraphModel parse_graph_model(std::string_view s) {
  if (s == "er") return GraphModel::ErdosRenyi;
  if (s == "ws") return GraphModel::WattsStrogatz;
  if (s == "ba") return GraphModel::BarabasiAlbert;
  throw ConfigError("unknown graph model '" + std::string(s) + "' (expected er, ws or ba)");
}

std::size_t default_ws_degree(std::size_t n) {
  const double l = std::log2(static_cast<double>(n));
  auto k = static_cast<std::size_t>(2.0 * std::round(l / 2.0));
  return std::max<std::size_t>(k, 2);
}

namespace {

Graph er_once(std::size_t n, double p, Rng& rng) {
  Matrix w(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (rng.bernoulli(p)) w(i, j) = w(j, i) = 1.0;
  return Graph(std::move(w));
}

// Ring lattice with rewiring in the Watts-Strogatz order: for each offset
// j = 1..k/2 and each node u, the edge (u, u+j) is moved to (u, w) with
// probability p, w uniform over nodes that are neither u nor its neighbours.
Graph ws_once(std::size_t n, std::size_t k, double p, Rng& rng) {
  std::vector<std::set<std::size_t>> adj(n);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t j = 1; j <= k / 2; ++j) {
      const std::size_t v = (u + j) % n;
      adj[u].insert(v);
      adj[v].insert(u);
    }
  }
  for (std::size_t j = 1; j <= k / 2; ++j) {
    for (std::size_t u = 0; u < n; ++u) {
      if (!rng.bernoulli(p)) continue;
      const std::size_t v = (u + j) % n;
      if (!adj[u].contains(v)) continue;
      if (adj[u].size() >= n - 1) continue;
      std::vector<std::size_t> candidates;
      for (std::size_t w = 0; w < n; ++w)
        if (w != u && !adj[u].contains(w)) candidates.push_back(w);
      const std::size_t w = candidates[rng.below(candidates.size())];
      adj[u].erase(v);
      adj[v].erase(u);
      adj[u].insert(w);
      adj[w].insert(u);
    }
  }
  Matrix wts(n, n);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v : adj[u]) wts(u, v) = 1.0;
  return Graph(std::move(wts));
}

}  // namespace

Graph gen_er(std::size_t n, double p, Rng& rng) {
  if (n < 2) throw ArgumentError("gen_er: need at least 2 nodes");
  if (!(p > 0.0 && p <= 1.0)) throw ArgumentError("gen_er: p must lie in (0, 1]");
  for (int attempt = 0; attempt < kMaxConnectAttempts; ++attempt) {
    Graph g = er_once(n, p, rng);
    if (g.connected()) return g;
  }
  throw GenerationError("gen_er: no connected graph after " + std::to_string(kMaxConnectAttempts) +
                        " attempts (n=" + std::to_string(n) + ", p=" + std::to_string(p) + ")");
}

Graph gen_ws(std::size_t n, std::size_t k, double p, Rng& rng) {
  if (k % 2 != 0 || k < 2) throw ArgumentError("gen_ws: k must be even and at least 2");
  if (k >= n) throw ArgumentError("gen_ws: k must be smaller than n");
  if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("gen_ws: p must lie in [0, 1]");
  for (int attempt = 0; attempt < kMaxConnectAttempts; ++attempt) {
    Graph g = ws_once(n, k, p, rng);
    if (g.connected()) return g;
  }
  throw GenerationError("gen_ws: no connected graph after " + std::to_string(kMaxConnectAttempts) + " attempts");
}

Graph gen_ba(std::size_t n, std::size_t m, Rng& rng) {
  if (m < 1 || m >= n) throw ArgumentError("gen_ba: need 1 <= m < n");
  Matrix w(n, n);
  // seed: star on m + 1 nodes
  std::vector<std::size_t> endpoints;  // each node repeated once per incident edge
  for (std::size_t v = 1; v <= m; ++v) {
    w(0, v) = w(v, 0) = 1.0;
    endpoints.push_back(0);
    endpoints.push_back(v);
  }
  for (std::size_t source = m + 1; source < n; ++source) {
    std::vector<std::size_t> targets;
    while (targets.size() < m) {
      const std::size_t t = endpoints[rng.below(endpoints.size())];
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    for (std::size_t t : targets) {
      w(source, t) = w(t, source) = 1.0;
      endpoints.push_back(t);
      endpoints.push_back(source);
    }
  }
  return Graph(std::move(w));
}

Graph generate_graph(const GraphSpec& spec, Rng& rng) {
  switch (spec.model) {
    case GraphModel::ErdosRenyi: return gen_er(spec.n, spec.p, rng);
    case GraphModel::WattsStrogatz: return gen_ws(spec.n, spec.k == 0 ? default_ws_degree(spec.n) : spec.k, spec.p, rng);
    case GraphModel::BarabasiAlbert: return gen_ba(spec.n, spec.m, rng);
  }
  throw ArgumentError("generate_graph: unknown model");
}

}  // namespace nugget
