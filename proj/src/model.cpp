#include "nugget/model.hpp"

#include <cmath>

#include "nugget/errors.hpp"

namespace nugget {

std::size_t NuggetParams::count() const {
  std::size_t c = 0;
  for (const auto& a : arrays) c += a.values.size();
  return c;
}

const ParamArray& NuggetParams::get(const std::string& name) const {
  for (const auto& a : arrays)
    if (a.name == name) return a;
  throw ArgumentError("no parameter array named '" + name + "'");
}

ParamArray& NuggetParams::get(const std::string& name) {
  return const_cast<ParamArray&>(static_cast<const NuggetParams&>(*this).get(name));
}

bool NuggetParams::all_finite() const {
  for (const auto& a : arrays)
    for (double v : a.values)
      if (!std::isfinite(v)) return false;
  return true;
}

namespace {

ParamArray glorot(std::string name, std::size_t fan_in, std::size_t fan_out, ad::Shape shape, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  ParamArray a{std::move(name), std::move(shape), {}};
  a.values.resize(ad::numel(a.shape));
  for (double& v : a.values) v = rng.uniform(-limit, limit);
  return a;
}

ParamArray zeros(std::string name, ad::Shape shape) {
  ParamArray a{std::move(name), std::move(shape), {}};
  a.values.assign(ad::numel(a.shape), 0.0);
  return a;
}

}  // namespace

NuggetParams init_params(const ModelConfig& c, Rng& rng) {
  if (c.features == 0 || c.key_features == 0 || c.heads == 0 || c.phi_hidden == 0 || c.psi_hidden == 0) {
    throw ArgumentError("init_params: every model dimension must be positive");
  }
  const std::size_t F = c.features, Fk = c.key_features;
  NuggetParams p{c, {}};
  p.arrays.push_back(glorot("expand.w", 1, F, {1, F}, rng));
  p.arrays.push_back(zeros("expand.b", {F}));
  for (std::size_t h = 0; h < c.heads; ++h) p.arrays.push_back(glorot("attn.query." + std::to_string(h), F, Fk, {F, Fk}, rng));
  for (std::size_t h = 0; h < c.heads; ++h) p.arrays.push_back(glorot("attn.key." + std::to_string(h), F, Fk, {F, Fk}, rng));
  const std::size_t phi_in = (c.heads + 1) * F;
  p.arrays.push_back(glorot("phi.w1", phi_in, c.phi_hidden, {phi_in, c.phi_hidden}, rng));
  p.arrays.push_back(zeros("phi.b1", {c.phi_hidden}));
  p.arrays.push_back(glorot("phi.w2", c.phi_hidden, F, {c.phi_hidden, F}, rng));
  p.arrays.push_back(zeros("phi.b2", {F}));
  p.arrays.push_back(glorot("psi.w1", F, c.psi_hidden, {F, c.psi_hidden}, rng));
  p.arrays.push_back(zeros("psi.b1", {c.psi_hidden}));
  p.arrays.push_back(glorot("psi.w2", c.psi_hidden, 1, {c.psi_hidden, 1}, rng));
  p.arrays.push_back(zeros("psi.b2", {1}));
  return p;
}

NuggetParams zero_like(const NuggetParams& p) {
  NuggetParams z = p;
  for (auto& a : z.arrays) std::fill(a.values.begin(), a.values.end(), 0.0);
  return z;
}

NuggetTape::NuggetTape(ad::Tape& tape, const NuggetParams& params, bool track_params)
    : tape_(tape), params_(params) {
  for (const auto& a : params.arrays) leaves_.push_back(tape.leaf(a.shape, a.values, track_params));
}

NuggetTape::NuggetTape(ad::Tape& tape, const NuggetParams& params, std::vector<ad::Var> leaves)
    : tape_(tape), params_(params), leaves_(std::move(leaves)) {
  if (leaves_.size() != params.arrays.size()) throw ArgumentError("NuggetTape: one leaf per parameter array");
}

ad::Var NuggetTape::leaf(const std::string& name) const {
  for (std::size_t i = 0; i < params_.arrays.size(); ++i)
    if (params_.arrays[i].name == name) return leaves_[i];
  throw ArgumentError("no parameter array named '" + name + "'");
}

ad::Var NuggetTape::encode(const Matrix& x, const std::vector<Matrix>* frozen_attention) {
  const ModelConfig& c = params_.config;
  const std::size_t n = x.rows(), k = x.cols(), F = c.features, Fk = c.key_features;
  if (n < 2 || k < 1) throw ArgumentError("encode: need at least 2 nodes and 1 game");
  for (double v : x.values())
    if (!std::isfinite(v)) throw DataError("encode: action matrix contains non-finite values");
  if (frozen_attention && frozen_attention->size() != c.heads) {
    throw ArgumentError("encode: frozen attention needs one matrix per head");
  }

  // y_ik = ReLU(x_ik w + b), rows ordered (i, k)
  const ad::Var xs = tape_.constant({n * k, 1}, x.values());
  const ad::Var y = ad::relu(ad::add_bias(ad::matmul(xs, leaf("expand.w")), leaf("expand.b")));
  const ad::Var y_by_node = ad::reshape(y, {n, k * F});

  std::vector<ad::Var> parts{y};
  attention_.clear();
  for (std::size_t h = 0; h < c.heads; ++h) {
    ad::Var alpha;
    if (frozen_attention) {
      alpha = tape_.constant({n, n}, (*frozen_attention)[h].values());
    } else {
      const std::string idx = std::to_string(h);
      const ad::Var q = ad::reshape(ad::matmul(y, leaf("attn.query." + idx)), {n, k * Fk});
      const ad::Var kk = ad::reshape(ad::matmul(y, leaf("attn.key." + idx)), {n, k * Fk});
      // scores summed over games: s_ij = sum_k q_ik . key_jk
      alpha = ad::softmax_rows(ad::matmul(q, ad::transpose(kk)));
    }
    attention_.push_back(alpha);
    parts.push_back(ad::reshape(ad::matmul(alpha, y_by_node), {n * k, F}));
  }
  const ad::Var joined = ad::concat_cols(parts);
  const ad::Var hidden = ad::relu(ad::add_bias(ad::matmul(joined, leaf("phi.w1")), leaf("phi.b1")));
  const ad::Var z = ad::add_bias(ad::matmul(hidden, leaf("phi.w2")), leaf("phi.b2"));
  return ad::reshape(z, {n, k, F});
}

ad::Var NuggetTape::decode(ad::Var z, std::size_t n, std::size_t k) {
  const std::size_t F = params_.config.features;
  const ad::Var pairs = ad::pair_gram(z, n, k, F);
  const ad::Var hidden = ad::relu(ad::add_bias(ad::matmul(pairs, leaf("psi.w1")), leaf("psi.b1")));
  const ad::Var out = ad::add_bias(ad::matmul(hidden, leaf("psi.w2")), leaf("psi.b2"));
  return ad::reshape(out, {n, n});
}

std::vector<Matrix> NuggetTape::attention() const {
  std::vector<Matrix> out;
  for (const ad::Var& a : attention_) {
    const auto v = a.value();
    out.emplace_back(a.rows(), a.cols(), std::vector<double>(v.begin(), v.end()));
  }
  return out;
}

Encoding encode(const NuggetParams& params, const Matrix& x) {
  ad::Tape tape;
  NuggetTape model(tape, params, false);
  const ad::Var z = model.encode(x);
  const auto v = z.value();
  return Encoding{x.rows(), x.cols(), params.config.features, {v.begin(), v.end()}, model.attention()};
}

Matrix decode(const NuggetParams& params, const Encoding& z) {
  for (double v : z.values)
    if (!std::isfinite(v)) throw DataError("decode: embedding contains non-finite values");
  ad::Tape tape;
  NuggetTape model(tape, params, false);
  const ad::Var logits = model.decode(tape.constant({z.n, z.k, z.f}, z.values), z.n, z.k);
  const auto v = logits.value();
  return Matrix(z.n, z.n, {v.begin(), v.end()});
}

Matrix forward(const NuggetParams& params, const Matrix& x) {
  ad::Tape tape;
  NuggetTape model(tape, params, false);
  const ad::Var p = ad::sigmoid(model.logits(x));
  const auto v = p.value();
  return Matrix(x.rows(), x.rows(), {v.begin(), v.end()});
}

Prediction predict(const NuggetParams& params, const Matrix& x, double threshold) {
  Prediction out{forward(params, x), Matrix(x.rows(), x.rows())};
  const std::size_t n = x.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double edge = out.probabilities(i, j) > threshold ? 1.0 : 0.0;
      out.adjacency(i, j) = out.adjacency(j, i) = edge;
    }
  return out;
}

double sample_loss(const NuggetParams& params, const GameSample& sample) {
  ad::Tape tape;
  NuggetTape model(tape, params, false);
  return ad::masked_bce(model.logits(sample.actions), sample.adjacency).item();
}

LossGrad sample_loss_grad(const NuggetParams& params, const GameSample& sample) {
  ad::Tape tape;
  NuggetTape model(tape, params, true);
  const ad::Var loss = ad::masked_bce(model.logits(sample.actions), sample.adjacency);
  tape.backward(loss);
  LossGrad out{loss.item(), {}};
  for (const ad::Var& leaf : model.leaves()) {
    const auto g = leaf.grad();
    out.grads.emplace_back(g.begin(), g.end());
  }
  return out;
}

ad::GradCheckResult model_grad_check(NuggetParams& params, const GameSample& sample, Rng& rng, std::size_t samples,
                                     double h) {
  std::vector<ad::ParamBlock> blocks;
  for (auto& a : params.arrays) blocks.push_back({a.name, a.shape, &a.values, true});
  const ad::LossBuilder loss = [&](ad::Tape& tape, std::span<const ad::Var> leaves) {
    NuggetTape model(tape, params, std::vector<ad::Var>(leaves.begin(), leaves.end()));
    return ad::masked_bce(model.logits(sample.actions), sample.adjacency);
  };
  return ad::grad_check(loss, blocks, rng, samples, h);
}

}  // namespace nugget
