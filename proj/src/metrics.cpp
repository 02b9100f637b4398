#include "nugget/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>
#include <utility>

#include "nugget/errors.hpp"

namespace nugget {

namespace {
void check_pair(const Matrix& a, const Matrix& b, const char* what) {
  if (!a.square() || a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ArgumentError(std::string(what) + ": score and truth matrices must be square and the same size");
  }
}
}  // namespace

double roc_auc(const Matrix& scores, const Matrix& truth) {
  check_pair(scores, truth, "roc_auc");
  const std::size_t n = scores.rows();
  std::vector<std::pair<double, bool>> pairs;
  pairs.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::isnan(scores(i, j))) throw DataError("roc_auc: scores contain NaN");
      pairs.emplace_back(scores(i, j), truth(i, j) != 0.0);
    }

  std::size_t positives = 0;
  for (const auto& p : pairs) positives += p.second ? 1 : 0;
  const std::size_t negatives = pairs.size() - positives;
  if (positives == 0 || negatives == 0) throw DataError("roc_auc: truth needs at least one edge and one non-edge");

  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  // rank sums are kept doubled so midranks stay integral
  std::size_t doubled_rank_sum = 0;
  for (std::size_t lo = 0; lo < pairs.size();) {
    std::size_t hi = lo;
    while (hi < pairs.size() && pairs[hi].first == pairs[lo].first) ++hi;
    const std::size_t doubled_midrank = lo + 1 + hi;  // 2 * average of ranks lo+1..hi
    for (std::size_t t = lo; t < hi; ++t)
      if (pairs[t].second) doubled_rank_sum += doubled_midrank;
    lo = hi;
  }
  // U = R - P(P+1)/2, doubled: 2R - P(P+1)
  const std::size_t doubled_u = doubled_rank_sum - positives * (positives + 1);
  return static_cast<double>(doubled_u) / (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
}

double accuracy(const Matrix& probabilities, const Matrix& truth, double threshold) {
  check_pair(probabilities, truth, "accuracy");
  const std::size_t n = truth.rows();
  if (n < 2) throw ArgumentError("accuracy: need at least two nodes");
  std::size_t correct = 0, total = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j, ++total)
      correct += ((probabilities(i, j) > threshold) == (truth(i, j) != 0.0)) ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(total);
}

namespace {
// Mean and SEM; identical values give exactly their value and zero.
std::pair<double, double> mean_sem(const std::vector<double>& v) {
  const double count = static_cast<double>(v.size());
  if (std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); })) return {v.front(), 0.0};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= count;
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (count - 1.0)) / std::sqrt(count)};
}
}  // namespace

MetricReport aggregate(std::span<const GraphMetric> per_graph) {
  if (per_graph.empty()) throw ArgumentError("aggregate: no graphs");
  MetricReport r;
  r.per_graph.assign(per_graph.begin(), per_graph.end());
  std::vector<double> auc, acc;
  for (const auto& m : per_graph) {
    auc.push_back(m.auc);
    acc.push_back(m.accuracy);
  }
  std::tie(r.mean_auc, r.sem_auc) = mean_sem(auc);
  std::tie(r.mean_acc, r.sem_acc) = mean_sem(acc);
  return r;
}

}  // namespace nugget
