#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nugget/linalg.hpp"
#include "nugget/rng.hpp"

// Reverse-mode differentiation over dense double tensors.
//
// Tensors are row-major; 2-D primitives view a tensor as
// (product of leading dims) x (last dim), so an N x K x F tensor and an
// (N*K) x F matrix share a layout and `reshape` is a copy-free relabel.

namespace nugget::ad {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& s);
std::string to_string(const Shape& s);

enum class Op {
  Leaf,
  MatMul,
  Add,
  Mul,
  AddBias,
  Scale,
  Relu,
  Sigmoid,
  SoftmaxRows,
  ConcatCols,
  SumAxis,
  MeanAxis,
  SumAll,
  Transpose,
  Reshape,
  PairGram,
  MaskedBce,
};

struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // empty unless requires_grad
  bool requires_grad = false;
  Op op = Op::Leaf;
  std::vector<std::size_t> inputs;
  std::vector<double> aux;     // op-specific saved data (targets, scale, ...)
  std::size_t axis = 0;        // SumAxis / MeanAxis
  std::size_t dim_a = 0, dim_b = 0, dim_c = 0;  // PairGram n, k, f

  std::size_t rows() const;
  std::size_t cols() const;
};

class Tape;

/// Handle to a node on a tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape& tape() const { return *tape_; }
  std::size_t id() const noexcept { return id_; }
  const Shape& shape() const;
  std::size_t rows() const;
  std::size_t cols() const;
  std::span<const double> value() const;
  std::span<const double> grad() const;
  double item() const;  // value of a single-element tensor

 private:
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Ordered record of executed primitives. Creation order is a topological
/// order, so backward is a single reverse pass; each node is visited once and
/// gradients accumulate additively across fan-out.
class Tape {
 public:
  Var leaf(Shape shape, std::vector<double> values, bool requires_grad = true);
  Var constant(Shape shape, std::vector<double> values) { return leaf(std::move(shape), std::move(values), false); }
  Var leaf(const Matrix& m, bool requires_grad = true);

  /// Seeds d(root)/d(root) = 1; root must hold a single element.
  void backward(Var root);

  std::size_t size() const noexcept { return nodes_.size(); }
  const Node& node(std::size_t id) const { return nodes_.at(id); }
  Node& node(std::size_t id) { return nodes_.at(id); }

  // Internal: used by primitives to append a node.
  Var push(Node node);

 private:
  void backward_node(std::size_t id);
  std::vector<Node> nodes_;
};

// --- primitives -----------------------------------------------------------
// Shape mismatches throw ArgumentError naming the primitive and shapes.

Var matmul(Var a, Var b);                 // (m x k)(k x n)
Var add(Var a, Var b);                    // same shape
Var mul(Var a, Var b);                    // same shape, elementwise
Var add_bias(Var a, Var bias);            // rows of a plus bias (numel == cols)
Var scale(Var a, double s);
Var relu(Var a);                          // subgradient at 0 is 0
Var sigmoid(Var a);
Var softmax_rows(Var a);
Var concat_cols(std::span<const Var> parts);
Var sum(Var a, std::size_t axis);         // 2-D view; axis 0 -> 1 x cols, 1 -> rows x 1
Var mean(Var a, std::size_t axis);
Var sum_all(Var a);
Var transpose(Var a);                     // 2-D view
Var reshape(Var a, Shape shape);

/// z viewed as n x k x f; out[(i, j), c] = sum_k z[i, k, c] * z[j, k, c].
/// Entries (i, j) and (j, i) are computed once and mirrored, so the result is
/// exactly symmetric in the node pair.
Var pair_gram(Var z, std::size_t n, std::size_t k, std::size_t f);

/// Mean binary cross-entropy over off-diagonal entries of square logits,
/// in the stable form max(y, 0) - y a + log(1 + exp(-|y|)). Diagonal
/// entries contribute neither loss nor gradient. Targets must be 0/1.
Var masked_bce(Var logits, const Matrix& target);

// --- finite-difference checking -------------------------------------------

/// One named parameter array. `tracked == false` marks a coordinate block
/// whose gradient is not recorded; it is never sampled.
struct ParamBlock {
  std::string name;
  Shape shape;
  std::vector<double>* values;
  bool tracked = true;
};

/// Builds the scalar loss on `tape` from leaves created for each block, in
/// order. Returns the loss var and the leaf vars.
using LossBuilder = std::function<Var(Tape& tape, std::span<const Var> leaves)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t coordinates = 0;  // compared coordinates
  std::size_t skipped = 0;      // coordinates with a kink inside the step
  std::string worst;            // "block[index]"
};

/// Central differences (step h) on a random subsample of `samples`
/// coordinates across tracked blocks (all coordinates if fewer exist).
/// A coordinate whose estimates at h and h/2 disagree by more than 1e-5
/// relative has a kink within the step; it is counted in `skipped` and
/// another is drawn.
/// Relative error denominator: max(|analytic|, |numeric|, 1e-3 * max|gradient|, 1e-8).
GradCheckResult grad_check(const LossBuilder& f, std::span<ParamBlock> params, Rng& rng,
                           std::size_t samples = 200, double h = 1e-5);

}  // namespace nugget::ad
