#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "nugget/autodiff.hpp"
#include "nugget/dataset.hpp"
#include "nugget/linalg.hpp"
#include "nugget/rng.hpp"

namespace nugget {

/// Network-game transformer hyperparameters. Defaults follow the published
/// configuration (F = F' = H = 10, MLP hidden width 100).
struct ModelConfig {
  std::size_t features = 10;       // F
  std::size_t key_features = 10;   // F'
  std::size_t heads = 10;          // H
  std::size_t phi_hidden = 100;
  std::size_t psi_hidden = 100;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct ParamArray {
  std::string name;
  ad::Shape shape;
  std::vector<double> values;

  friend bool operator==(const ParamArray&, const ParamArray&) = default;
};

/// All learnable arrays, stored input x output so a layer is `rows * W`:
///   expand.w, expand.b          1 x F, F
///   attn.query.h, attn.key.h    F x F' per head (score = y_i Q_h K_h^T y_j^T)
///   phi.w1, phi.b1, phi.w2, phi.b2   (H+1)F -> hidden -> F
///   psi.w1, psi.b1, psi.w2, psi.b2   F -> hidden -> 1
struct NuggetParams {
  ModelConfig config;
  std::vector<ParamArray> arrays;

  std::size_t count() const;  // total scalar count
  const ParamArray& get(const std::string& name) const;
  ParamArray& get(const std::string& name);
  bool all_finite() const;

  friend bool operator==(const NuggetParams&, const NuggetParams&) = default;
};

/// Uniform(+-sqrt(6 / (fan_in + fan_out))) weights, zero biases.
NuggetParams init_params(const ModelConfig& config, Rng& rng);
NuggetParams zero_like(const NuggetParams& p);

/// Builds the model's forward computation for one action matrix on a tape.
class NuggetTape {
 public:
  NuggetTape(ad::Tape& tape, const NuggetParams& params, bool track_params);
  /// Uses caller-made leaves, one per parameter array in order.
  NuggetTape(ad::Tape& tape, const NuggetParams& params, std::vector<ad::Var> leaves);

  /// Encoder output viewed as N x K x F. When `frozen_attention` is given
  /// (one N x N row-stochastic matrix per head) it replaces the computed
  /// attention weights.
  ad::Var encode(const Matrix& x, const std::vector<Matrix>* frozen_attention = nullptr);
  /// N x N logits, exactly symmetric.
  ad::Var decode(ad::Var z, std::size_t n, std::size_t k);
  ad::Var logits(const Matrix& x) { return decode(encode(x), x.rows(), x.cols()); }

  const std::vector<ad::Var>& leaves() const noexcept { return leaves_; }
  /// Attention weights of the most recent encode, one matrix per head.
  std::vector<Matrix> attention() const;

 private:
  ad::Var leaf(const std::string& name) const;

  ad::Tape& tape_;
  const NuggetParams& params_;
  std::vector<ad::Var> leaves_;
  std::vector<ad::Var> attention_;
};

struct Encoding {
  std::size_t n = 0, k = 0, f = 0;
  std::vector<double> values;  // n x k x f row-major
  std::vector<Matrix> attention;

  double at(std::size_t i, std::size_t g, std::size_t c) const { return values[(i * k + g) * f + c]; }
};

Encoding encode(const NuggetParams& params, const Matrix& x);
Matrix decode(const NuggetParams& params, const Encoding& z);
/// sigmoid(decode(encode(x))).
Matrix forward(const NuggetParams& params, const Matrix& x);

struct Prediction {
  Matrix probabilities;
  Matrix adjacency;  // probabilities > threshold, zero diagonal
};

Prediction predict(const NuggetParams& params, const Matrix& x, double threshold = 0.5);

/// Masked BCE of one sample and its gradient for every parameter array.
struct LossGrad {
  double loss = 0.0;
  std::vector<std::vector<double>> grads;
};

double sample_loss(const NuggetParams& params, const GameSample& sample);
LossGrad sample_loss_grad(const NuggetParams& params, const GameSample& sample);

/// Central-difference check of the full loss gradient on one sample.
ad::GradCheckResult model_grad_check(NuggetParams& params, const GameSample& sample, Rng& rng,
                                     std::size_t samples = 200, double h = 1e-5);

}  // namespace nugget
