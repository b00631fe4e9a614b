#pragma once

#include <cstdint>
#include <vector>

#include "hcn/graph.hpp"
#include "hcn/types.hpp"

namespace hcn {

// One trainable linear map per node type, projecting every type's features
// into a shared width so the blocks can be stacked into one n x out_dim
// matrix in global node order.
struct TypeTransforms {
  std::vector<Matrix> maps;  // per type, F_o x out_dim
  Index out_dim = 0;
};

// Glorot-uniform init, one derived stream per type.
TypeTransforms init_transforms(const HeteroGraph& g, Index out_dim, std::uint64_t seed);

Matrix fuse(const HeteroGraph& g, const TypeTransforms& t);

// d(loss)/d(maps[o]) given d(loss)/d(fused output).
std::vector<Matrix> fuse_backward(const HeteroGraph& g, const Matrix& d_fused);

}  // namespace hcn
