#pragma once

#include <vector>

#include "hcn/types.hpp"

namespace hcn {

// Reverse-mode tape over the handful of ops the network needs. Values are
// computed eagerly at record time; backward() runs one reverse sweep and
// returns an adjoint per node (leaves carry the parameter gradients).
class Tape {
 public:
  using NodeId = int;

  NodeId leaf(Matrix value);
  // a * value(x); a is borrowed and must outlive the tape.
  NodeId spmm(const SpMat& a, NodeId x);
  NodeId matmul(NodeId a, NodeId b);
  NodeId relu(NodeId x);
  // value(x) .* factor, with factor held constant (dropout masks).
  NodeId cwise_mul(NodeId x, Matrix factor);

  const Matrix& value(NodeId id) const;

  // Seeds d(output) = upstream and sweeps the tape in reverse. Adjoints of
  // nodes that do not feed the output come back as zero matrices for leaves
  // and empty matrices otherwise.
  std::vector<Matrix> backward(NodeId output, const Matrix& upstream) const;

 private:
  enum class Op { leaf, spmm, matmul, relu, cwise_mul };

  struct Node {
    Op op;
    NodeId a = -1;
    NodeId b = -1;
    const SpMat* sp = nullptr;
    Matrix aux;  // cwise factor
    Matrix val;
  };

  NodeId push(Node n);
  void check_id(NodeId id) const;

  std::vector<Node> nodes_;
};

}  // namespace hcn
