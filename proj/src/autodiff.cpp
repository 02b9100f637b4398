#include "nugget/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "nugget/errors.hpp"

namespace nugget::ad {

std::size_t numel(const Shape& s) {
  return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
}

std::string to_string(const Shape& s) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "x" : "") << s[i];
  os << ']';
  return os.str();
}

std::size_t Node::rows() const { return shape.empty() ? 1 : numel(shape) / shape.back(); }
std::size_t Node::cols() const { return shape.empty() ? 1 : shape.back(); }

const Shape& Var::shape() const { return tape_->node(id_).shape; }
std::size_t Var::rows() const { return tape_->node(id_).rows(); }
std::size_t Var::cols() const { return tape_->node(id_).cols(); }
std::span<const double> Var::value() const { return tape_->node(id_).value; }
std::span<const double> Var::grad() const { return tape_->node(id_).grad; }

double Var::item() const {
  const auto v = value();
  if (v.size() != 1) throw ArgumentError("item: tensor of shape " + to_string(shape()) + " is not a scalar");
  return v[0];
}

Var Tape::leaf(Shape shape, std::vector<double> values, bool requires_grad) {
  if (numel(shape) != values.size()) {
    throw ArgumentError("leaf: " + std::to_string(values.size()) + " values for shape " + to_string(shape));
  }
  Node n;
  n.shape = std::move(shape);
  n.value = std::move(values);
  n.requires_grad = requires_grad;
  return push(std::move(n));
}

Var Tape::leaf(const Matrix& m, bool requires_grad) { return leaf({m.rows(), m.cols()}, m.values(), requires_grad); }

Var Tape::push(Node node) {
  if (node.requires_grad) node.grad.assign(node.value.size(), 0.0);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

namespace {

[[noreturn]] void shape_error(const char* op, const Shape& a, const Shape& b) {
  throw ArgumentError(std::string(op) + ": incompatible shapes " + to_string(a) + " and " + to_string(b));
}

bool any_grad(Tape& t, std::initializer_list<Var> vs) {
  for (const Var& v : vs)
    if (t.node(v.id()).requires_grad) return true;
  return false;
}

Node make_node(Op op, Shape shape, std::vector<std::size_t> inputs, bool requires_grad) {
  Node n;
  n.op = op;
  n.shape = std::move(shape);
  n.value.assign(numel(n.shape), 0.0);
  n.inputs = std::move(inputs);
  n.requires_grad = requires_grad;
  return n;
}

// c (m x n) += a (m x k) * b (k x n)
void gemm_nn(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c + i * n;
    const double* ai = a + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = ai[p];
      if (aip == 0.0) continue;
      const double* bp = b + p * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
    }
  }
}

// c (m x k) += a (m x n) * b^T, b is (k x n)
void gemm_nt(const double* a, const double* b, double* c, std::size_t m, std::size_t n, std::size_t k) {
  std::vector<double> bt(n * k);
  for (std::size_t p = 0; p < k; ++p)
    for (std::size_t j = 0; j < n; ++j) bt[j * k + p] = b[p * n + j];
  gemm_nn(a, bt.data(), c, m, n, k);
}

// c (k x n) += a^T * b, a is (m x k), b is (m x n)
void gemm_tn(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* ai = a + i * k;
    const double* bi = b + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = ai[p];
      if (aip == 0.0) continue;
      double* cp = c + p * n;
      for (std::size_t j = 0; j < n; ++j) cp[j] += aip * bi[j];
    }
  }
}

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Var matmul(Var a, Var b) {
  Tape& t = a.tape();
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  if (b.rows() != k || b.shape().size() != 2 || a.shape().size() != 2) shape_error("matmul", a.shape(), b.shape());
  Node out = make_node(Op::MatMul, {m, n}, {a.id(), b.id()}, any_grad(t, {a, b}));
  gemm_nn(a.value().data(), b.value().data(), out.value.data(), m, k, n);
  return t.push(std::move(out));
}

Var add(Var a, Var b) {
  Tape& t = a.tape();
  if (a.shape() != b.shape()) shape_error("add", a.shape(), b.shape());
  Node out = make_node(Op::Add, a.shape(), {a.id(), b.id()}, any_grad(t, {a, b}));
  const auto av = a.value(), bv = b.value();
  for (std::size_t i = 0; i < out.value.size(); ++i) out.value[i] = av[i] + bv[i];
  return t.push(std::move(out));
}

Var mul(Var a, Var b) {
  Tape& t = a.tape();
  if (a.shape() != b.shape()) shape_error("mul", a.shape(), b.shape());
  Node out = make_node(Op::Mul, a.shape(), {a.id(), b.id()}, any_grad(t, {a, b}));
  const auto av = a.value(), bv = b.value();
  for (std::size_t i = 0; i < out.value.size(); ++i) out.value[i] = av[i] * bv[i];
  return t.push(std::move(out));
}

Var add_bias(Var a, Var bias) {
  Tape& t = a.tape();
  const std::size_t m = a.rows(), n = a.cols();
  if (numel(bias.shape()) != n) shape_error("add_bias", a.shape(), bias.shape());
  Node out = make_node(Op::AddBias, a.shape(), {a.id(), bias.id()}, any_grad(t, {a, bias}));
  const auto av = a.value(), bv = bias.value();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out.value[i * n + j] = av[i * n + j] + bv[j];
  return t.push(std::move(out));
}

Var scale(Var a, double s) {
  Tape& t = a.tape();
  Node out = make_node(Op::Scale, a.shape(), {a.id()}, any_grad(t, {a}));
  out.aux = {s};
  const auto av = a.value();
  for (std::size_t i = 0; i < out.value.size(); ++i) out.value[i] = s * av[i];
  return t.push(std::move(out));
}

Var relu(Var a) {
  Tape& t = a.tape();
  Node out = make_node(Op::Relu, a.shape(), {a.id()}, any_grad(t, {a}));
  const auto av = a.value();
  for (std::size_t i = 0; i < out.value.size(); ++i) out.value[i] = av[i] > 0.0 ? av[i] : 0.0;
  return t.push(std::move(out));
}

Var sigmoid(Var a) {
  Tape& t = a.tape();
  Node out = make_node(Op::Sigmoid, a.shape(), {a.id()}, any_grad(t, {a}));
  const auto av = a.value();
  for (std::size_t i = 0; i < out.value.size(); ++i) out.value[i] = stable_sigmoid(av[i]);
  return t.push(std::move(out));
}

Var softmax_rows(Var a) {
  Tape& t = a.tape();
  const std::size_t m = a.rows(), n = a.cols();
  Node out = make_node(Op::SoftmaxRows, a.shape(), {a.id()}, any_grad(t, {a}));
  const auto av = a.value();
  for (std::size_t i = 0; i < m; ++i) {
    const double* x = av.data() + i * n;
    double* y = out.value.data() + i * n;
    const double top = *std::max_element(x, x + n);
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      y[j] = std::exp(x[j] - top);
      z += y[j];
    }
    for (std::size_t j = 0; j < n; ++j) y[j] /= z;
  }
  return t.push(std::move(out));
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ArgumentError("concat_cols: no inputs");
  Tape& t = parts[0].tape();
  const std::size_t m = parts[0].rows();
  std::size_t total = 0;
  bool grad = false;
  std::vector<std::size_t> ids;
  for (const Var& p : parts) {
    if (p.rows() != m) shape_error("concat_cols", parts[0].shape(), p.shape());
    total += p.cols();
    grad = grad || t.node(p.id()).requires_grad;
    ids.push_back(p.id());
  }
  Shape shape = parts[0].shape();
  shape.back() = total;
  Node out = make_node(Op::ConcatCols, shape, std::move(ids), grad);
  std::size_t offset = 0;
  for (const Var& p : parts) {
    const std::size_t c = p.cols();
    const auto pv = p.value();
    for (std::size_t i = 0; i < m; ++i) std::copy_n(pv.data() + i * c, c, out.value.data() + i * total + offset);
    offset += c;
  }
  return t.push(std::move(out));
}

namespace {
Var reduce_axis(Var a, std::size_t axis, Op op) {
  Tape& t = a.tape();
  const std::size_t m = a.rows(), n = a.cols();
  if (axis > 1) throw ArgumentError("sum/mean: axis must be 0 or 1 for shape " + to_string(a.shape()));
  Node out = make_node(op, axis == 0 ? Shape{1, n} : Shape{m, 1}, {a.id()}, any_grad(t, {a}));
  out.axis = axis;
  const auto av = a.value();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out.value[axis == 0 ? j : i] += av[i * n + j];
  if (op == Op::MeanAxis) {
    const double d = static_cast<double>(axis == 0 ? m : n);
    for (double& v : out.value) v /= d;
  }
  return t.push(std::move(out));
}
}  // namespace

Var sum(Var a, std::size_t axis) { return reduce_axis(a, axis, Op::SumAxis); }
Var mean(Var a, std::size_t axis) { return reduce_axis(a, axis, Op::MeanAxis); }

Var sum_all(Var a) {
  Tape& t = a.tape();
  Node out = make_node(Op::SumAll, {1}, {a.id()}, any_grad(t, {a}));
  double s = 0.0;
  for (double v : a.value()) s += v;
  out.value[0] = s;
  return t.push(std::move(out));
}

Var transpose(Var a) {
  Tape& t = a.tape();
  const std::size_t m = a.rows(), n = a.cols();
  Node out = make_node(Op::Transpose, {n, m}, {a.id()}, any_grad(t, {a}));
  const auto av = a.value();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out.value[j * m + i] = av[i * n + j];
  return t.push(std::move(out));
}

Var reshape(Var a, Shape shape) {
  Tape& t = a.tape();
  if (numel(shape) != numel(a.shape())) shape_error("reshape", a.shape(), shape);
  Node out = make_node(Op::Reshape, std::move(shape), {a.id()}, any_grad(t, {a}));
  const auto av = a.value();
  std::copy(av.begin(), av.end(), out.value.begin());
  return t.push(std::move(out));
}

Var pair_gram(Var z, std::size_t n, std::size_t k, std::size_t f) {
  Tape& t = z.tape();
  if (numel(z.shape()) != n * k * f) shape_error("pair_gram", z.shape(), Shape{n, k, f});
  Node out = make_node(Op::PairGram, {n * n, f}, {z.id()}, any_grad(t, {z}));
  out.dim_a = n;
  out.dim_b = k;
  out.dim_c = f;
  const double* zv = z.value().data();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double* o = out.value.data() + (i * n + j) * f;
      for (std::size_t g = 0; g < k; ++g) {
        const double* zi = zv + (i * k + g) * f;
        const double* zj = zv + (j * k + g) * f;
        for (std::size_t c = 0; c < f; ++c) o[c] += zi[c] * zj[c];
      }
      if (j != i) std::copy_n(o, f, out.value.data() + (j * n + i) * f);
    }
  }
  return t.push(std::move(out));
}

Var masked_bce(Var logits, const Matrix& target) {
  Tape& t = logits.tape();
  const std::size_t n = target.rows();
  if (!target.square() || logits.shape() != Shape{n, n}) {
    shape_error("masked_bce", logits.shape(), Shape{target.rows(), target.cols()});
  }
  if (n < 2) throw ArgumentError("masked_bce: need at least two nodes");
  for (double v : target.values())
    if (v != 0.0 && v != 1.0) throw ArgumentError("masked_bce: targets must be binary");
  Node out = make_node(Op::MaskedBce, {1}, {logits.id()}, any_grad(t, {logits}));
  out.aux = target.values();
  const auto y = logits.value();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double x = y[i * n + j];
      const double a = target(i, j);
      total += std::max(x, 0.0) - x * a + std::log1p(std::exp(-std::abs(x)));
    }
  }
  out.value[0] = total / static_cast<double>(n * (n - 1));
  return t.push(std::move(out));
}

void Tape::backward(Var root) {
  if (&root.tape() != this) throw ArgumentError("backward: variable belongs to another tape");
  Node& r = nodes_.at(root.id());
  if (r.value.size() != 1) throw ArgumentError("backward: root of shape " + to_string(r.shape) + " is not scalar");
  if (!r.requires_grad) return;
  r.grad[0] += 1.0;
  for (std::size_t id = root.id() + 1; id-- > 0;) {
    if (nodes_[id].requires_grad && nodes_[id].op != Op::Leaf) backward_node(id);
  }
}

void Tape::backward_node(std::size_t id) {
  const Node& out = nodes_[id];
  const std::vector<double>& g = out.grad;
  auto input = [&](std::size_t slot) -> Node& { return nodes_[out.inputs[slot]]; };
  auto wants = [&](std::size_t slot) { return nodes_[out.inputs[slot]].requires_grad; };

  switch (out.op) {
    case Op::Leaf:
      break;
    case Op::MatMul: {
      Node& a = input(0);
      Node& b = input(1);
      const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
      if (a.requires_grad) gemm_nt(g.data(), b.value.data(), a.grad.data(), m, n, k);
      if (b.requires_grad) gemm_tn(a.value.data(), g.data(), b.grad.data(), m, k, n);
      break;
    }
    case Op::Add:
      for (std::size_t s = 0; s < 2; ++s) {
        if (!wants(s)) continue;
        Node& a = input(s);
        for (std::size_t i = 0; i < g.size(); ++i) a.grad[i] += g[i];
      }
      break;
    case Op::Mul: {
      Node& a = input(0);
      Node& b = input(1);
      if (a.requires_grad)
        for (std::size_t i = 0; i < g.size(); ++i) a.grad[i] += g[i] * b.value[i];
      if (b.requires_grad)
        for (std::size_t i = 0; i < g.size(); ++i) b.grad[i] += g[i] * a.value[i];
      break;
    }
    case Op::AddBias: {
      Node& a = input(0);
      Node& bias = input(1);
      const std::size_t m = out.rows(), n = out.cols();
      if (a.requires_grad)
        for (std::size_t i = 0; i < g.size(); ++i) a.grad[i] += g[i];
      if (bias.requires_grad)
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < n; ++j) bias.grad[j] += g[i * n + j];
      break;
    }
    case Op::Scale: {
      Node& a = input(0);
      for (std::size_t i = 0; i < g.size(); ++i) a.grad[i] += out.aux[0] * g[i];
      break;
    }
    case Op::Relu: {
      Node& a = input(0);
      for (std::size_t i = 0; i < g.size(); ++i)
        if (a.value[i] > 0.0) a.grad[i] += g[i];
      break;
    }
    case Op::Sigmoid: {
      Node& a = input(0);
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double y = out.value[i];
        a.grad[i] += g[i] * y * (1.0 - y);
      }
      break;
    }
    case Op::SoftmaxRows: {
      Node& a = input(0);
      const std::size_t m = out.rows(), n = out.cols();
      for (std::size_t i = 0; i < m; ++i) {
        const double* y = out.value.data() + i * n;
        const double* gi = g.data() + i * n;
        double inner = 0.0;
        for (std::size_t j = 0; j < n; ++j) inner += gi[j] * y[j];
        double* ag = a.grad.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) ag[j] += y[j] * (gi[j] - inner);
      }
      break;
    }
    case Op::ConcatCols: {
      const std::size_t m = out.rows(), total = out.cols();
      std::size_t offset = 0;
      for (std::size_t s = 0; s < out.inputs.size(); ++s) {
        Node& p = input(s);
        const std::size_t c = p.cols();
        if (p.requires_grad) {
          for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < c; ++j) p.grad[i * c + j] += g[i * total + offset + j];
        }
        offset += c;
      }
      break;
    }
    case Op::SumAxis:
    case Op::MeanAxis: {
      Node& a = input(0);
      const std::size_t m = a.rows(), n = a.cols();
      const double d = out.op == Op::MeanAxis ? static_cast<double>(out.axis == 0 ? m : n) : 1.0;
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) a.grad[i * n + j] += g[out.axis == 0 ? j : i] / d;
      break;
    }
    case Op::SumAll: {
      Node& a = input(0);
      for (double& v : a.grad) v += g[0];
      break;
    }
    case Op::Transpose: {
      Node& a = input(0);
      const std::size_t m = a.rows(), n = a.cols();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) a.grad[i * n + j] += g[j * m + i];
      break;
    }
    case Op::Reshape: {
      Node& a = input(0);
      for (std::size_t i = 0; i < g.size(); ++i) a.grad[i] += g[i];
      break;
    }
    case Op::PairGram: {
      Node& z = input(0);
      const std::size_t n = out.dim_a, k = out.dim_b, f = out.dim_c;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          const double* gij = g.data() + (i * n + j) * f;
          for (std::size_t q = 0; q < k; ++q) {
            double* dzi = z.grad.data() + (i * k + q) * f;
            double* dzj = z.grad.data() + (j * k + q) * f;
            const double* zi = z.value.data() + (i * k + q) * f;
            const double* zj = z.value.data() + (j * k + q) * f;
            for (std::size_t c = 0; c < f; ++c) {
              dzi[c] += gij[c] * zj[c];
              dzj[c] += gij[c] * zi[c];
            }
          }
        }
      }
      break;
    }
    case Op::MaskedBce: {
      Node& logits = input(0);
      const std::size_t n = logits.rows();
      const double w = g[0] / static_cast<double>(n * (n - 1));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          if (i == j) continue;
          const std::size_t idx = i * n + j;
          logits.grad[idx] += w * (stable_sigmoid(logits.value[idx]) - out.aux[idx]);
        }
      break;
    }
  }
}

GradCheckResult grad_check(const LossBuilder& f, std::span<ParamBlock> params, Rng& rng, std::size_t samples,
                           double h) {
  auto evaluate = [&](bool with_grad, std::vector<std::vector<double>>* grads) {
    Tape tape;
    std::vector<Var> leaves;
    for (const ParamBlock& p : params) leaves.push_back(tape.leaf(p.shape, *p.values, with_grad && p.tracked));
    const Var loss = f(tape, leaves);
    const double value = loss.item();
    if (!std::isfinite(value)) throw NumericalError("grad_check: loss is not finite");
    if (grads) {
      tape.backward(loss);
      grads->clear();
      for (std::size_t b = 0; b < params.size(); ++b) {
        const auto gr = leaves[b].grad();
        grads->emplace_back(gr.begin(), gr.end());
      }
    }
    return value;
  };

  std::vector<std::vector<double>> analytic;
  evaluate(true, &analytic);

  std::vector<std::pair<std::size_t, std::size_t>> coords;
  for (std::size_t b = 0; b < params.size(); ++b) {
    if (!params[b].tracked) continue;
    for (std::size_t i = 0; i < params[b].values->size(); ++i) coords.emplace_back(b, i);
  }
  // components far below the largest one are judged against a fraction of
  // its size; central differences cannot resolve them more finely
  double scale = 0.0;
  for (std::size_t b = 0; b < params.size(); ++b)
    if (params[b].tracked)
      for (double g : analytic[b]) scale = std::max(scale, std::abs(g));
  const double floor = std::max(1e-3 * scale, 1e-8);

  auto central = [&](double& x, double step) {
    const double saved = x;
    x = saved + step;
    const double up = evaluate(false, nullptr);
    x = saved - step;
    const double down = evaluate(false, nullptr);
    x = saved;
    return (up - down) / (2.0 * step);
  };

  GradCheckResult result;
  // coordinates are drawn without replacement until `samples` have been compared
  for (std::size_t c = 0; c < coords.size() && result.coordinates < samples; ++c) {
    std::swap(coords[c], coords[c + static_cast<std::size_t>(rng.below(coords.size() - c))]);
    auto [b, i] = coords[c];
    double& x = (*params[b].values)[i];
    const double numeric = central(x, h);
    const double half = central(x, 0.5 * h);
    const double a = analytic[b][i];
    if (!std::isfinite(a) || !std::isfinite(numeric) || !std::isfinite(half))
      throw NumericalError("grad_check: non-finite derivative");
    // on a smooth stretch the two estimates agree to O(h^2); a kink inside
    // the step makes them disagree and the difference quotient meaningless
    if (std::abs(numeric - half) > 1e-5 * std::max({std::abs(numeric), std::abs(half), floor})) {
      ++result.skipped;
      continue;
    }
    ++result.coordinates;
    const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), floor});
    if (rel >= result.max_rel_error) {
      result.max_rel_error = rel;
      result.worst = params[b].name + "[" + std::to_string(i) + "]";
    }
  }
  return result;
}

}  // namespace nugget::ad
