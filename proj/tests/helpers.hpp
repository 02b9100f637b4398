#pragma once

#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

#include "nugget/graphs.hpp"
#include "nugget/linalg.hpp"
#include "nugget/rng.hpp"

namespace nugget::testing {

inline Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng) {
  Matrix m(r, c);
  for (double& v : m.values()) v = rng.normal();
  return m;
}

inline Matrix random_symmetric(std::size_t n, Rng& rng) {
  Matrix m = random_matrix(n, n, rng);
  return 0.5 * (m + m.transposed());
}

inline std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rng.below(i)]);
  return p;
}

// Relabel as Graph::permuted does: entry (i, j) of the result is m(perm[i], perm[j]).
inline Matrix permute_sym(const Matrix& m, const std::vector<std::size_t>& perm) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(perm[i], perm[j]);
  return out;
}

inline Matrix permute_rows(const Matrix& m, const std::vector<std::size_t>& perm) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(perm[i], j);
  return out;
}

inline Matrix permute_cols(const Matrix& m, const std::vector<std::size_t>& perm) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, perm[j]);
  return out;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.values()[i] - b.values()[i]));
  return d;
}

// 6-cycle with the chord 0-3; the reference values in oracles/values.txt use it.
inline Graph hexagon_with_chord() {
  return Graph::from_edges(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}, {0, 3}});
}

inline Graph path(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Graph::from_edges(n, e);
}

inline Matrix empirical_cov(const std::vector<Vector>& samples) {
  const std::size_t n = samples.front().size();
  const double count = static_cast<double>(samples.size());
  Vector mean(n, 0.0);
  for (const auto& s : samples)
    for (std::size_t i = 0; i < n; ++i) mean[i] += s[i] / count;
  Matrix c(n, n);
  for (const auto& s : samples)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) c(i, j) += (s[i] - mean[i]) * (s[j] - mean[j]);
  return (1.0 / (count - 1.0)) * c;
}

// O(P Q) pairwise AUC over i < j, ties counting 1/2.
inline double brute_force_auc(const Matrix& scores, const Matrix& truth) {
  std::vector<double> pos, neg;
  for (std::size_t i = 0; i < truth.rows(); ++i)
    for (std::size_t j = i + 1; j < truth.cols(); ++j) (truth(i, j) > 0.5 ? pos : neg).push_back(scores(i, j));
  double wins = 0.0;
  for (double p : pos)
    for (double q : neg) wins += p > q ? 1.0 : p == q ? 0.5 : 0.0;
  return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

struct AucInstance {
  Matrix scores, truth;
};

// 3..12 nodes, both classes present; every other instance uses coarse
// integer scores so ties are common.
inline AucInstance random_auc_instance(Rng& rng, bool coarse) {
  for (;;) {
    const std::size_t n = 3 + rng.below(10);
    AucInstance inst{Matrix(n, n), Matrix(n, n)};
    const double density = rng.uniform(0.1, 0.9);
    std::size_t pos = 0, total = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double t = rng.bernoulli(density) ? 1.0 : 0.0;
        const double s = coarse ? static_cast<double>(rng.below(4)) : rng.normal();
        inst.truth(i, j) = inst.truth(j, i) = t;
        inst.scores(i, j) = inst.scores(j, i) = s;
        pos += t > 0.0;
        ++total;
      }
    if (pos > 0 && pos < total) return inst;
  }
}

inline double rel_frobenius(const Matrix& a, const Matrix& ref) { return (a - ref).frobenius() / ref.frobenius(); }

}  // namespace nugget::testing
