#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hgctr/tensor.hpp"

namespace hgctr {

using NodeId = std::int32_t;

/// Primitive operations of the reverse-mode engine. The forward computation
/// (embedding lookup -> propagation -> fusion -> head -> loss) decomposes
/// into exactly these.
enum class Op : std::uint8_t {
  kLeaf,           // constant or trainable parameter
  kAdd,            // elementwise a + b
  kAffine,         // alpha * x + beta, alpha/beta constants
  kMul,            // elementwise a * b
  kMatVec,         // [m,n] matrix times [n] vector
  kConcat,         // 1-d concatenation
  kMeanStack,      // elementwise mean over k same-shape tensors
  kSumStack,       // elementwise sum over k same-shape tensors
  kSigmoid,
  kTanh,
  kRelu,
  kLog,            // natural log
  kClip,           // clamp to [lo, hi], constants
  kSumAll,         // sum of all coordinates -> scalar
  kMaskedSoftmax,  // softmax over coordinates where mask=1, zero elsewhere
  kWeightedSum,    // sum_i w[i] * x_i, w a vector node, x_i same-shape nodes
};

std::string_view op_name(Op op);

/// Registry of trainable parameters. Ids are dense and assigned in
/// registration order, which also fixes checkpoint layout.
class ParameterStore {
 public:
  int add(std::string name, Tensor init);
  std::size_t count() const { return entries_.size(); }
  Tensor& value(int id);
  const Tensor& value(int id) const;
  const std::string& name(int id) const;

 private:
  struct Entry {
    std::string name;
    Tensor value;
  };
  std::vector<Entry> entries_;
  void check(int id) const;
};

/// Gradient per parameter id, shape-aligned with the store.
using GradientMap = std::vector<Tensor>;

struct TapeNode {
  Op op = Op::kLeaf;
  double c0 = 0.0;  // kAffine alpha / kClip lo
  double c1 = 0.0;  // kAffine beta / kClip hi
  std::vector<NodeId> inputs;
  std::vector<double> mask;  // kMaskedSoftmax only
  int param = -1;            // kLeaf: parameter id, -1 for constants
  Tensor value;
};

/// Record of one forward pass. Ops evaluate eagerly as nodes are appended,
/// so the node list is topologically ordered by construction and can be
/// replayed bit-identically.
class Tape {
 public:
  NodeId constant(Tensor value);
  NodeId param(const ParameterStore& store, int id);

  NodeId add(NodeId a, NodeId b);
  NodeId affine(NodeId x, double alpha, double beta);
  NodeId mul(NodeId a, NodeId b);
  NodeId matvec(NodeId w, NodeId x);
  NodeId concat(std::span<const NodeId> xs);
  NodeId mean_stack(std::span<const NodeId> xs);
  NodeId sum_stack(std::span<const NodeId> xs);
  NodeId sigmoid(NodeId x);
  NodeId tanh(NodeId x);
  NodeId relu(NodeId x);
  NodeId log(NodeId x);
  NodeId clip(NodeId x, double lo, double hi);
  NodeId sum_all(NodeId x);
  NodeId masked_softmax(NodeId x, std::vector<double> mask);
  NodeId weighted_sum(NodeId weights, std::span<const NodeId> xs);

  const Tensor& value(NodeId id) const;
  const TapeNode& node(NodeId id) const;
  std::size_t size() const { return nodes_.size(); }
  void clear() { nodes_.clear(); }

  /// Recomputes every node value from the leaves. Same code path as the
  /// original forward, so results are bit-identical.
  std::vector<Tensor> replay() const;

  /// d(loss)/d(node value) for every node, zeros where no path exists.
  /// loss must be scalar.
  std::vector<Tensor> node_gradients(NodeId loss) const;

 private:
  std::vector<TapeNode> nodes_;
  NodeId push(TapeNode node);
  static Tensor eval(const TapeNode& node, std::span<const Tensor* const> in);
  Tensor eval_here(const TapeNode& node) const;
  void check_id(NodeId id) const;
};

/// Reverse-mode gradients of a scalar loss for every registered parameter.
/// Parameters with no path to the loss get zero gradients.
GradientMap forward_backward(const Tape& tape, NodeId loss, const ParameterStore& params);

}  // namespace hgctr
