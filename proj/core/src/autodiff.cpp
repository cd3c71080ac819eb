#include "hgctr/autodiff.hpp"

#include <cmath>
#include <utility>

#include "hgctr/errors.hpp"

namespace hgctr {

std::string_view op_name(Op op) {
  switch (op) {
    case Op::kLeaf: return "leaf";
    case Op::kAdd: return "add";
    case Op::kAffine: return "affine";
    case Op::kMul: return "mul";
    case Op::kMatVec: return "matvec";
    case Op::kConcat: return "concat";
    case Op::kMeanStack: return "mean_stack";
    case Op::kSumStack: return "sum_stack";
    case Op::kSigmoid: return "sigmoid";
    case Op::kTanh: return "tanh";
    case Op::kRelu: return "relu";
    case Op::kLog: return "log";
    case Op::kClip: return "clip";
    case Op::kSumAll: return "sum_all";
    case Op::kMaskedSoftmax: return "masked_softmax";
    case Op::kWeightedSum: return "weighted_sum";
  }
  return "unknown";
}

int ParameterStore::add(std::string name, Tensor init) {
  entries_.push_back(Entry{std::move(name), std::move(init)});
  return static_cast<int>(entries_.size()) - 1;
}

void ParameterStore::check(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= entries_.size()) {
    throw ContractError("ParameterStore: unknown parameter id " + std::to_string(id));
  }
}

Tensor& ParameterStore::value(int id) {
  check(id);
  return entries_[static_cast<std::size_t>(id)].value;
}

const Tensor& ParameterStore::value(int id) const {
  check(id);
  return entries_[static_cast<std::size_t>(id)].value;
}

const std::string& ParameterStore::name(int id) const {
  check(id);
  return entries_[static_cast<std::size_t>(id)].name;
}

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ContractError(msg);
}

void require_finite(const Tensor& t, Op op) {
  if (!t.all_finite()) {
    throw NumericError(std::string("non-finite value produced by '") + std::string(op_name(op)) +
                       "'");
  }
}

}  // namespace

void Tape::check_id(NodeId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size()) {
    throw ContractError("Tape: unknown node id " + std::to_string(id));
  }
}

const Tensor& Tape::value(NodeId id) const {
  check_id(id);
  return nodes_[static_cast<std::size_t>(id)].value;
}

const TapeNode& Tape::node(NodeId id) const {
  check_id(id);
  return nodes_[static_cast<std::size_t>(id)];
}

NodeId Tape::push(TapeNode node) {
  node.value = eval_here(node);
  require_finite(node.value, node.op);
  nodes_.push_back(std::move(node));
  return static_cast<NodeId>(nodes_.size()) - 1;
}

Tensor Tape::eval_here(const TapeNode& node) const {
  std::vector<const Tensor*> in;
  in.reserve(node.inputs.size());
  for (NodeId id : node.inputs) {
    check_id(id);
    in.push_back(&nodes_[static_cast<std::size_t>(id)].value);
  }
  return eval(node, in);
}

Tensor Tape::eval(const TapeNode& node, std::span<const Tensor* const> in) {
  switch (node.op) {
    case Op::kLeaf:
      return node.value;
    case Op::kAdd: {
      const Tensor& a = *in[0];
      const Tensor& b = *in[1];
      Tensor out = a;
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
      return out;
    }
    case Op::kAffine: {
      Tensor out = *in[0];
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = node.c0 * out[i] + node.c1;
      return out;
    }
    case Op::kMul: {
      const Tensor& a = *in[0];
      const Tensor& b = *in[1];
      Tensor out = a;
      for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
      return out;
    }
    case Op::kMatVec: {
      const Tensor& w = *in[0];
      const Tensor& x = *in[1];
      const std::size_t m = w.rows();
      const std::size_t n = w.cols();
      Tensor out = Tensor::zeros({m});
      for (std::size_t r = 0; r < m; ++r) {
        double acc = 0.0;
        const double* row = w.data() + r * n;
        for (std::size_t c = 0; c < n; ++c) acc += row[c] * x[c];
        out[r] = acc;
      }
      return out;
    }
    case Op::kConcat: {
      std::size_t total = 0;
      for (const Tensor* t : in) total += t->size();
      Tensor out = Tensor::zeros({total});
      std::size_t pos = 0;
      for (const Tensor* t : in) {
        for (std::size_t i = 0; i < t->size(); ++i) out[pos++] = (*t)[i];
      }
      return out;
    }
    case Op::kMeanStack: {
      Tensor out = Tensor::zeros(in[0]->shape());
      for (const Tensor* t : in) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += (*t)[i];
      }
      const double inv = 1.0 / static_cast<double>(in.size());
      for (std::size_t i = 0; i < out.size(); ++i) out[i] *= inv;
      return out;
    }
    case Op::kSumStack: {
      Tensor out = Tensor::zeros(in[0]->shape());
      for (const Tensor* t : in) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += (*t)[i];
      }
      return out;
    }
    case Op::kSigmoid: {
      Tensor out = *in[0];
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-out[i]));
      return out;
    }
    case Op::kTanh: {
      Tensor out = *in[0];
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(out[i]);
      return out;
    }
    case Op::kRelu: {
      Tensor out = *in[0];
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = out[i] > 0.0 ? out[i] : 0.0;
      return out;
    }
    case Op::kLog: {
      Tensor out = *in[0];
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::log(out[i]);
      return out;
    }
    case Op::kClip: {
      Tensor out = *in[0];
      for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i] < node.c0) out[i] = node.c0;
        if (out[i] > node.c1) out[i] = node.c1;
      }
      return out;
    }
    case Op::kSumAll: {
      double acc = 0.0;
      for (std::size_t i = 0; i < in[0]->size(); ++i) acc += (*in[0])[i];
      return Tensor::scalar(acc);
    }
    case Op::kMaskedSoftmax: {
      const Tensor& x = *in[0];
      Tensor out = Tensor::zeros(x.shape());
      // Shift by the masked max; softmax is shift invariant so the shift
      // contributes nothing to the gradient.
      double mx = -HUGE_VAL;
      bool any = false;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (node.mask[i] != 0.0) {
          any = true;
          if (x[i] > mx) mx = x[i];
        }
      }
      if (!any) return out;  // all-pad: zero weights
      double z = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (node.mask[i] != 0.0) {
          out[i] = std::exp(x[i] - mx);
          z += out[i];
        }
      }
      for (std::size_t i = 0; i < x.size(); ++i) out[i] /= z;
      return out;
    }
    case Op::kWeightedSum: {
      const Tensor& w = *in[0];
      Tensor out = Tensor::zeros(in[1]->shape());
      for (std::size_t k = 1; k < in.size(); ++k) {
        const double wk = w[k - 1];
        const Tensor& x = *in[k];
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += wk * x[i];
      }
      return out;
    }
  }
  throw ContractError("Tape: unknown op");
}

NodeId Tape::constant(Tensor value) {
  TapeNode n;
  n.op = Op::kLeaf;
  n.value = std::move(value);
  require_finite(n.value, Op::kLeaf);
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size()) - 1;
}

NodeId Tape::param(const ParameterStore& store, int id) {
  TapeNode n;
  n.op = Op::kLeaf;
  n.param = id;
  n.value = store.value(id);
  require_finite(n.value, Op::kLeaf);
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size()) - 1;
}

NodeId Tape::add(NodeId a, NodeId b) {
  require(value(a).same_shape(value(b)), "add: shape mismatch " + shape_string(value(a).shape()) +
                                             " vs " + shape_string(value(b).shape()));
  TapeNode n;
  n.op = Op::kAdd;
  n.inputs = {a, b};
  return push(std::move(n));
}

NodeId Tape::affine(NodeId x, double alpha, double beta) {
  check_id(x);
  TapeNode n;
  n.op = Op::kAffine;
  n.c0 = alpha;
  n.c1 = beta;
  n.inputs = {x};
  return push(std::move(n));
}

NodeId Tape::mul(NodeId a, NodeId b) {
  require(value(a).same_shape(value(b)), "mul: shape mismatch");
  TapeNode n;
  n.op = Op::kMul;
  n.inputs = {a, b};
  return push(std::move(n));
}

NodeId Tape::matvec(NodeId w, NodeId x) {
  require(value(w).shape().size() == 2, "matvec: first input must be rank 2");
  require(value(x).shape().size() == 1, "matvec: second input must be rank 1");
  require(value(w).cols() == value(x).size(), "matvec: inner dimensions differ");
  TapeNode n;
  n.op = Op::kMatVec;
  n.inputs = {w, x};
  return push(std::move(n));
}

NodeId Tape::concat(std::span<const NodeId> xs) {
  require(!xs.empty(), "concat: needs at least one input");
  for (NodeId id : xs) {
    require(value(id).shape().size() == 1, "concat: inputs must be rank 1");
  }
  TapeNode n;
  n.op = Op::kConcat;
  n.inputs.assign(xs.begin(), xs.end());
  return push(std::move(n));
}

NodeId Tape::mean_stack(std::span<const NodeId> xs) {
  require(!xs.empty(), "mean_stack: needs at least one input");
  for (NodeId id : xs) {
    require(value(id).same_shape(value(xs[0])), "mean_stack: inputs must share a shape");
  }
  TapeNode n;
  n.op = Op::kMeanStack;
  n.inputs.assign(xs.begin(), xs.end());
  return push(std::move(n));
}

NodeId Tape::sum_stack(std::span<const NodeId> xs) {
  require(!xs.empty(), "sum_stack: needs at least one input");
  for (NodeId id : xs) {
    require(value(id).same_shape(value(xs[0])), "sum_stack: inputs must share a shape");
  }
  TapeNode n;
  n.op = Op::kSumStack;
  n.inputs.assign(xs.begin(), xs.end());
  return push(std::move(n));
}

NodeId Tape::sigmoid(NodeId x) {
  check_id(x);
  TapeNode n;
  n.op = Op::kSigmoid;
  n.inputs = {x};
  return push(std::move(n));
}

NodeId Tape::tanh(NodeId x) {
  check_id(x);
  TapeNode n;
  n.op = Op::kTanh;
  n.inputs = {x};
  return push(std::move(n));
}

NodeId Tape::relu(NodeId x) {
  check_id(x);
  TapeNode n;
  n.op = Op::kRelu;
  n.inputs = {x};
  return push(std::move(n));
}

NodeId Tape::log(NodeId x) {
  check_id(x);
  for (std::size_t i = 0; i < value(x).size(); ++i) {
    if (!(value(x)[i] > 0.0)) {
      throw NumericError("log: non-positive input at coordinate " + std::to_string(i));
    }
  }
  TapeNode n;
  n.op = Op::kLog;
  n.inputs = {x};
  return push(std::move(n));
}

NodeId Tape::clip(NodeId x, double lo, double hi) {
  check_id(x);
  require(lo <= hi, "clip: lo must be <= hi");
  TapeNode n;
  n.op = Op::kClip;
  n.c0 = lo;
  n.c1 = hi;
  n.inputs = {x};
  return push(std::move(n));
}

NodeId Tape::sum_all(NodeId x) {
  check_id(x);
  TapeNode n;
  n.op = Op::kSumAll;
  n.inputs = {x};
  return push(std::move(n));
}

NodeId Tape::masked_softmax(NodeId x, std::vector<double> mask) {
  require(value(x).shape().size() == 1, "masked_softmax: input must be rank 1");
  require(mask.size() == value(x).size(), "masked_softmax: mask size mismatch");
  TapeNode n;
  n.op = Op::kMaskedSoftmax;
  n.mask = std::move(mask);
  n.inputs = {x};
  return push(std::move(n));
}

NodeId Tape::weighted_sum(NodeId weights, std::span<const NodeId> xs) {
  require(!xs.empty(), "weighted_sum: needs at least one term");
  require(value(weights).shape().size() == 1, "weighted_sum: weights must be rank 1");
  require(value(weights).size() == xs.size(), "weighted_sum: weight count mismatch");
  for (NodeId id : xs) {
    require(value(id).same_shape(value(xs[0])), "weighted_sum: terms must share a shape");
  }
  TapeNode n;
  n.op = Op::kWeightedSum;
  n.inputs.reserve(xs.size() + 1);
  n.inputs.push_back(weights);
  n.inputs.insert(n.inputs.end(), xs.begin(), xs.end());
  return push(std::move(n));
}

std::vector<Tensor> Tape::replay() const {
  std::vector<Tensor> out;
  out.reserve(nodes_.size());
  std::vector<const Tensor*> in;
  for (const TapeNode& node : nodes_) {
    if (node.op == Op::kLeaf) {
      out.push_back(node.value);
      continue;
    }
    in.clear();
    for (NodeId id : node.inputs) in.push_back(&out[static_cast<std::size_t>(id)]);
    out.push_back(eval(node, in));
  }
  return out;
}

std::vector<Tensor> Tape::node_gradients(NodeId loss) const {
  check_id(loss);
  const Tensor& loss_value = nodes_[static_cast<std::size_t>(loss)].value;
  if (!loss_value.is_scalar()) {
    throw ContractError("backward: loss node must be scalar, got shape " +
                        shape_string(loss_value.shape()));
  }

  std::vector<Tensor> grads(nodes_.size());
  auto grad_of = [&](NodeId id) -> Tensor& {
    Tensor& g = grads[static_cast<std::size_t>(id)];
    if (g.empty()) g = Tensor::zeros(nodes_[static_cast<std::size_t>(id)].value.shape());
    return g;
  };
  grad_of(loss)[0] = 1.0;

  for (NodeId id = loss; id >= 0; --id) {
    const TapeNode& node = nodes_[static_cast<std::size_t>(id)];
    const Tensor& g = grads[static_cast<std::size_t>(id)];
    if (g.empty() || node.op == Op::kLeaf) continue;
    if (!g.all_finite()) {
      throw NumericError(std::string("NaN gradient at '") + std::string(op_name(node.op)) + "'");
    }
    const Tensor& y = node.value;
    switch (node.op) {
      case Op::kLeaf:
        break;
      case Op::kAdd: {
        Tensor& ga = grad_of(node.inputs[0]);
        Tensor& gb = grad_of(node.inputs[1]);
        for (std::size_t i = 0; i < g.size(); ++i) {
          ga[i] += g[i];
          gb[i] += g[i];
        }
        break;
      }
      case Op::kAffine: {
        Tensor& gx = grad_of(node.inputs[0]);
        for (std::size_t i = 0; i < g.size(); ++i) gx[i] += node.c0 * g[i];
        break;
      }
      case Op::kMul: {
        const Tensor& a = nodes_[static_cast<std::size_t>(node.inputs[0])].value;
        const Tensor& b = nodes_[static_cast<std::size_t>(node.inputs[1])].value;
        Tensor& ga = grad_of(node.inputs[0]);
        Tensor& gb = grad_of(node.inputs[1]);
        for (std::size_t i = 0; i < g.size(); ++i) {
          ga[i] += g[i] * b[i];
          gb[i] += g[i] * a[i];
        }
        break;
      }
      case Op::kMatVec: {
        const Tensor& w = nodes_[static_cast<std::size_t>(node.inputs[0])].value;
        const Tensor& x = nodes_[static_cast<std::size_t>(node.inputs[1])].value;
        Tensor& gw = grad_of(node.inputs[0]);
        Tensor& gx = grad_of(node.inputs[1]);
        const std::size_t m = w.rows();
        const std::size_t n = w.cols();
        for (std::size_t r = 0; r < m; ++r) {
          const double gr = g[r];
          double* gw_row = gw.data() + r * n;
          const double* w_row = w.data() + r * n;
          for (std::size_t c = 0; c < n; ++c) {
            gw_row[c] += gr * x[c];
            gx[c] += gr * w_row[c];
          }
        }
        break;
      }
      case Op::kConcat: {
        std::size_t pos = 0;
        for (NodeId in_id : node.inputs) {
          Tensor& gi = grad_of(in_id);
          for (std::size_t i = 0; i < gi.size(); ++i) gi[i] += g[pos++];
        }
        break;
      }
      case Op::kMeanStack: {
        const double inv = 1.0 / static_cast<double>(node.inputs.size());
        for (NodeId in_id : node.inputs) {
          Tensor& gi = grad_of(in_id);
          for (std::size_t i = 0; i < g.size(); ++i) gi[i] += inv * g[i];
        }
        break;
      }
      case Op::kSumStack: {
        for (NodeId in_id : node.inputs) {
          Tensor& gi = grad_of(in_id);
          for (std::size_t i = 0; i < g.size(); ++i) gi[i] += g[i];
        }
        break;
      }
      case Op::kSigmoid: {
        Tensor& gx = grad_of(node.inputs[0]);
        for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * y[i] * (1.0 - y[i]);
        break;
      }
      case Op::kTanh: {
        Tensor& gx = grad_of(node.inputs[0]);
        for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * (1.0 - y[i] * y[i]);
        break;
      }
      case Op::kRelu: {
        const Tensor& x = nodes_[static_cast<std::size_t>(node.inputs[0])].value;
        Tensor& gx = grad_of(node.inputs[0]);
        for (std::size_t i = 0; i < g.size(); ++i) {
          if (x[i] > 0.0) gx[i] += g[i];
        }
        break;
      }
      case Op::kLog: {
        const Tensor& x = nodes_[static_cast<std::size_t>(node.inputs[0])].value;
        Tensor& gx = grad_of(node.inputs[0]);
        for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] / x[i];
        break;
      }
      case Op::kClip: {
        const Tensor& x = nodes_[static_cast<std::size_t>(node.inputs[0])].value;
        Tensor& gx = grad_of(node.inputs[0]);
        for (std::size_t i = 0; i < g.size(); ++i) {
          if (x[i] > node.c0 && x[i] < node.c1) gx[i] += g[i];
        }
        break;
      }
      case Op::kSumAll: {
        Tensor& gx = grad_of(node.inputs[0]);
        const double gs = g[0];
        for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gs;
        break;
      }
      case Op::kMaskedSoftmax: {
        // dL/dx_i = y_i * (g_i - sum_j g_j y_j) on the masked set.
        Tensor& gx = grad_of(node.inputs[0]);
        double dot = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) dot += g[i] * y[i];
        for (std::size_t i = 0; i < g.size(); ++i) {
          if (node.mask[i] != 0.0) gx[i] += y[i] * (g[i] - dot);
        }
        break;
      }
      case Op::kWeightedSum: {
        const Tensor& w = nodes_[static_cast<std::size_t>(node.inputs[0])].value;
        Tensor& gw = grad_of(node.inputs[0]);
        for (std::size_t k = 1; k < node.inputs.size(); ++k) {
          const Tensor& x = nodes_[static_cast<std::size_t>(node.inputs[k])].value;
          Tensor& gx = grad_of(node.inputs[k]);
          double acc = 0.0;
          const double wk = w[k - 1];
          for (std::size_t i = 0; i < g.size(); ++i) {
            acc += g[i] * x[i];
            gx[i] += wk * g[i];
          }
          gw[k - 1] += acc;
        }
        break;
      }
    }
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (grads[i].empty()) grads[i] = Tensor::zeros(nodes_[i].value.shape());
  }
  return grads;
}

GradientMap forward_backward(const Tape& tape, NodeId loss, const ParameterStore& params) {
  std::vector<Tensor> node_grads = tape.node_gradients(loss);
  GradientMap out;
  out.reserve(params.count());
  for (std::size_t id = 0; id < params.count(); ++id) {
    out.push_back(Tensor::zeros(params.value(static_cast<int>(id)).shape()));
  }
  for (std::size_t i = 0; i < tape.size(); ++i) {
    const TapeNode& node = tape.node(static_cast<NodeId>(i));
    if (node.op != Op::kLeaf || node.param < 0) continue;
    Tensor& dst = out[static_cast<std::size_t>(node.param)];
    const Tensor& src = node_grads[i];
    if (!dst.same_shape(src)) {
      throw ContractError("forward_backward: gradient shape mismatch for parameter '" +
                          params.name(node.param) + "'");
    }
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
  }
  return out;
}

}  // namespace hgctr
