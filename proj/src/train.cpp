#include "nugget/train.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "nugget/errors.hpp"

namespace nugget {

void TrainConfig::validate() const {
  if (!(lr > 0.0)) throw ConfigError("learning rate must be positive");
  if (batch_size < 1) throw ConfigError("batch size must be positive");
  if (max_epochs < 1) throw ConfigError("max_epochs must be positive");
}

LossGrad batch_loss_grad(const NuggetParams& params, std::span<const GameSample* const> batch, Exec exec) {
  if (batch.empty()) throw ArgumentError("batch_loss_grad: empty batch");
  std::vector<LossGrad> per_sample(batch.size());
  for_each_index(exec, batch.size(), [&](std::size_t i) { per_sample[i] = sample_loss_grad(params, *batch[i]); });

  LossGrad total{0.0, {}};
  for (const auto& a : params.arrays) total.grads.emplace_back(a.values.size(), 0.0);
  for (const LossGrad& s : per_sample) {
    total.loss += s.loss;
    for (std::size_t p = 0; p < total.grads.size(); ++p)
      for (std::size_t i = 0; i < total.grads[p].size(); ++i) total.grads[p][i] += s.grads[p][i];
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  total.loss *= inv;
  for (auto& g : total.grads)
    for (double& v : g) v *= inv;
  return total;
}

Evaluation evaluate_model(const NuggetParams& params, std::span<const GameSample* const> samples, double threshold,
                          Exec exec) {
  if (samples.empty()) throw ArgumentError("evaluate_model: no samples");
  Evaluation out;
  out.losses.resize(samples.size());
  std::vector<GraphMetric> metrics(samples.size());
  for_each_index(exec, samples.size(), [&](std::size_t i) {
    const GameSample& s = *samples[i];
    ad::Tape tape;
    NuggetTape model(tape, params, false);
    const ad::Var logits = model.logits(s.actions);
    out.losses[i] = ad::masked_bce(logits, s.adjacency).item();
    const ad::Var probs = ad::sigmoid(logits);
    const auto v = probs.value();
    const Matrix p(s.n(), s.n(), {v.begin(), v.end()});
    metrics[i] = GraphMetric{roc_auc(p, s.adjacency), accuracy(p, s.adjacency, threshold)};
  });
  out.metrics = aggregate(metrics);
  out.mean_loss = std::accumulate(out.losses.begin(), out.losses.end(), 0.0) / static_cast<double>(samples.size());
  return out;
}

namespace {
std::vector<const GameSample*> pointers(const Dataset& ds, Split split) {
  std::vector<const GameSample*> out;
  for (std::size_t i : ds.indices(split)) out.push_back(&ds.samples[i]);
  return out;
}
}  // namespace

Evaluation evaluate_model(const NuggetParams& params, const Dataset& ds, Split split, double threshold, Exec exec) {
  const auto samples = pointers(ds, split);
  if (samples.empty()) throw ConfigError("dataset has no '" + std::string(to_string(split)) + "' samples");
  return evaluate_model(params, samples, threshold, exec);
}

TrainResult train(const Dataset& ds, const TrainConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  const auto train_set = pointers(ds, Split::Train);
  const auto val_set = pointers(ds, Split::Val);
  if (train_set.empty()) throw ConfigError("train: dataset has an empty train split");
  if (val_set.empty()) throw ConfigError("train: dataset has an empty validation split");

  const Rng root(cfg.seed);
  Rng init_rng = root.split(0);
  Rng shuffle_rng = root.split(1);

  NuggetParams params = init_params(cfg.model, init_rng);
  ad::AdamState adam;
  adam.lr = cfg.lr;
  std::vector<std::vector<double>*> targets;
  for (auto& a : params.arrays) targets.push_back(&a.values);

  TrainResult result{params, {}, 0};
  double best = -std::numeric_limits<double>::infinity();
  std::size_t stale = 0;
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<const GameSample*> batch;

  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle_rng.below(i)]);

    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      batch.clear();
      for (std::size_t i = start; i < stop; ++i) batch.push_back(train_set[order[i]]);
      const LossGrad lg = batch_loss_grad(params, batch, cfg.exec);
      if (!std::isfinite(lg.loss)) {
        throw NumericalError("train: non-finite loss at epoch " + std::to_string(epoch) + ", batch starting at " +
                             std::to_string(start));
      }
      ad::adam_step(adam, targets, lg.grads);
      loss_sum += lg.loss * static_cast<double>(batch.size());
    }

    const Evaluation val = evaluate_model(params, val_set, 0.5, cfg.exec);
    EpochLog entry{epoch, loss_sum / static_cast<double>(order.size()), val.mean_loss, val.metrics.mean_auc,
                   val.metrics.mean_acc};
    result.log.push_back(entry);

    const double score = cfg.stop_metric == StopMetric::ValAuc ? entry.val_auc : -entry.val_loss;
    if (score > best) {
      best = score;
      stale = 0;
      result.params = params;
      result.best_epoch = epoch;
    } else {
      ++stale;
    }
    if (on_epoch && !on_epoch(entry)) break;
    if (stale > cfg.patience) break;
  }
  return result;
}

}  // namespace nugget
