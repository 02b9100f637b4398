#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "nugget/adam.hpp"
#include "nugget/dataset.hpp"
#include "nugget/metrics.hpp"
#include "nugget/model.hpp"
#include "nugget/parallel.hpp"

namespace nugget {

enum class StopMetric { ValAuc, ValLoss };

struct TrainConfig {
  double lr = 0.001;
  std::size_t batch_size = 100;
  std::size_t patience = 50;
  std::size_t max_epochs = 1000;
  std::uint64_t seed = 0;
  StopMetric stop_metric = StopMetric::ValAuc;
  ModelConfig model;
  Exec exec = Exec::Parallel;

  void validate() const;
};

struct EpochLog {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_auc = 0.0;
  double val_acc = 0.0;

  friend bool operator==(const EpochLog&, const EpochLog&) = default;
};

struct TrainResult {
  NuggetParams params;  // best validation epoch
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;  // epochs count from 0; also the index into `log`
};

/// Mean loss and mean gradient over a batch of samples. Per-sample work is
/// independent; the reduction runs in index order so Serial and Parallel
/// agree bit for bit.
LossGrad batch_loss_grad(const NuggetParams& params, std::span<const GameSample* const> batch,
                         Exec exec = Exec::Parallel);

/// Loss and metrics of the model on a set of samples (one entry per sample).
struct Evaluation {
  std::vector<double> losses;
  MetricReport metrics;
  double mean_loss = 0.0;
};

Evaluation evaluate_model(const NuggetParams& params, std::span<const GameSample* const> samples,
                          double threshold = 0.5, Exec exec = Exec::Parallel);
Evaluation evaluate_model(const NuggetParams& params, const Dataset& ds, Split split, double threshold = 0.5,
                          Exec exec = Exec::Parallel);

/// Called after every epoch; returning false stops training early.
using EpochCallback = std::function<bool(const EpochLog&)>;

/// Adam on shuffled minibatches of the train split; after each epoch the
/// validation split is scored and the best parameters kept. Training stops
/// once `patience` consecutive epochs fail to improve the stop metric, or at
/// max_epochs. Initial parameters come from Rng(seed).split(0), shuffling
/// from Rng(seed).split(1).
TrainResult train(const Dataset& ds, const TrainConfig& cfg, const EpochCallback& on_epoch = {});

}  // namespace nugget
