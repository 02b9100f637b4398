#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nugget/linalg.hpp"

namespace nugget {

/// ROC AUC over unordered pairs i < j: the probability that a random true
/// edge outscores a random non-edge, ties counting 1/2 (midrank statistic).
/// Throws DataError when the upper triangle holds only one class.
double roc_auc(const Matrix& scores, const Matrix& truth);

/// Fraction of pairs i < j where (score > threshold) matches the truth.
double accuracy(const Matrix& probabilities, const Matrix& truth, double threshold = 0.5);

struct GraphMetric {
  double auc = 0.0;
  double accuracy = 0.0;
};

struct MetricReport {
  std::vector<GraphMetric> per_graph;
  double mean_auc = 0.0, sem_auc = 0.0;
  double mean_acc = 0.0, sem_acc = 0.0;
};

/// Unweighted means and SEM (n - 1 sample deviation over sqrt(n); 0 for n = 1).
MetricReport aggregate(std::span<const GraphMetric> per_graph);

}  // namespace nugget
