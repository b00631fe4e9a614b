#include "hcn/autodiff.hpp"

#include <stdexcept>

namespace hcn {

Tape::NodeId Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size()) - 1;
}

void Tape::check_id(NodeId id) const {
  if (id < 0 || id >= static_cast<NodeId>(nodes_.size()))
    throw std::invalid_argument("tape: unknown node id");
}

Tape::NodeId Tape::leaf(Matrix value) {
  return push({Op::leaf, -1, -1, nullptr, {}, std::move(value)});
}

Tape::NodeId Tape::spmm(const SpMat& a, NodeId x) {
  check_id(x);
  if (a.cols() != nodes_[x].val.rows())
    throw std::invalid_argument("tape: spmm inner dimensions do not match");
  Matrix val = a * nodes_[x].val;
  return push({Op::spmm, x, -1, &a, {}, std::move(val)});
}

Tape::NodeId Tape::matmul(NodeId a, NodeId b) {
  check_id(a);
  check_id(b);
  if (nodes_[a].val.cols() != nodes_[b].val.rows())
    throw std::invalid_argument("tape: matmul inner dimensions do not match");
  Matrix val = nodes_[a].val * nodes_[b].val;
  return push({Op::matmul, a, b, nullptr, {}, std::move(val)});
}

Tape::NodeId Tape::relu(NodeId x) {
  check_id(x);
  Matrix val = nodes_[x].val.cwiseMax(0.0);
  return push({Op::relu, x, -1, nullptr, {}, std::move(val)});
}

Tape::NodeId Tape::cwise_mul(NodeId x, Matrix factor) {
  check_id(x);
  if (factor.rows() != nodes_[x].val.rows() || factor.cols() != nodes_[x].val.cols())
    throw std::invalid_argument("tape: cwise_mul factor shape does not match");
  Matrix val = nodes_[x].val.cwiseProduct(factor);
  return push({Op::cwise_mul, x, -1, nullptr, std::move(factor), std::move(val)});
}

const Matrix& Tape::value(NodeId id) const {
  check_id(id);
  return nodes_[id].val;
}

std::vector<Matrix> Tape::backward(NodeId output, const Matrix& upstream) const {
  check_id(output);
  const Matrix& out_val = nodes_[output].val;
  if (upstream.rows() != out_val.rows() || upstream.cols() != out_val.cols())
    throw std::invalid_argument("tape: upstream gradient shape does not match output");

  std::vector<Matrix> adj(nodes_.size());
  std::vector<char> seen(nodes_.size(), 0);
  auto accumulate = [&](NodeId id, Matrix g) {
    if (!seen[id]) {
      adj[id] = std::move(g);
      seen[id] = 1;
    } else {
      adj[id] += g;
    }
  };

  accumulate(output, upstream);
  // Operand ids are always smaller than the node's own id, so one descending
  // sweep visits every node after all of its consumers.
  for (NodeId i = output; i >= 0; --i) {
    if (!seen[i]) continue;
    const Node& nd = nodes_[i];
    const Matrix& g = adj[i];
    switch (nd.op) {
      case Op::leaf:
        break;
      case Op::spmm:
        accumulate(nd.a, nd.sp->transpose() * g);
        break;
      case Op::matmul:
        accumulate(nd.a, g * nodes_[nd.b].val.transpose());
        accumulate(nd.b, nodes_[nd.a].val.transpose() * g);
        break;
      case Op::relu: {
        const Matrix& input = nodes_[nd.a].val;
        // Zero exactly where the pre-activation was <= 0.
        Matrix masked = (input.array() > 0.0).select(g, Matrix::Zero(g.rows(), g.cols()));
        accumulate(nd.a, std::move(masked));
        break;
      }
      case Op::cwise_mul:
        accumulate(nd.a, g.cwiseProduct(nd.aux));
        break;
    }
  }

  // Leaves that never fed the output still deserve well-formed gradients.
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (!seen[i] && nodes_[i].op == Op::leaf)
      adj[i] = Matrix::Zero(nodes_[i].val.rows(), nodes_[i].val.cols());

  return adj;
}

}  // namespace hcn
