#include "hcn/fusion.hpp"

#include <cmath>
#include <stdexcept>

#include "hcn/rng.hpp"

namespace hcn {

TypeTransforms init_transforms(const HeteroGraph& g, Index out_dim, std::uint64_t seed) {
  if (out_dim < 1) throw std::invalid_argument("init_transforms: out_dim must be >= 1");
  TypeTransforms t;
  t.out_dim = out_dim;
  t.maps.reserve(g.types.size());
  for (std::size_t o = 0; o < g.types.size(); ++o) {
    const Index f_o = g.features[o].cols();
    const double bound = std::sqrt(6.0 / static_cast<double>(f_o + out_dim));
    Rng rng(derive_seed(seed, "fusion", o));
    Matrix m(f_o, out_dim);
    for (Index r = 0; r < f_o; ++r)
      for (Index c = 0; c < out_dim; ++c) m(r, c) = rng.uniform(-bound, bound);
    t.maps.push_back(std::move(m));
  }
  return t;
}

Matrix fuse(const HeteroGraph& g, const TypeTransforms& t) {
  if (t.maps.size() != g.types.size())
    throw std::invalid_argument("fuse: transform count does not match type count");
  Matrix out(g.n, t.out_dim);
  for (std::size_t o = 0; o < g.types.size(); ++o) {
    if (g.features[o].cols() != t.maps[o].rows())
      throw std::invalid_argument("fuse: type '" + g.types[o].name + "' has feature width " +
                                  std::to_string(g.features[o].cols()) +
                                  " but its transform expects " +
                                  std::to_string(t.maps[o].rows()));
    Matrix block = g.features[o] * t.maps[o];
    const auto& members = g.types[o].members;
    for (std::size_t rk = 0; rk < members.size(); ++rk)
      out.row(members[rk]) = block.row(static_cast<Index>(rk));
  }
  return out;
}

std::vector<Matrix> fuse_backward(const HeteroGraph& g, const Matrix& d_fused) {
  if (d_fused.rows() != g.n)
    throw std::invalid_argument("fuse_backward: gradient row count does not match node count");
  std::vector<Matrix> grads;
  grads.reserve(g.types.size());
  for (std::size_t o = 0; o < g.types.size(); ++o) {
    const auto& members = g.types[o].members;
    Matrix block(static_cast<Index>(members.size()), d_fused.cols());
    for (std::size_t rk = 0; rk < members.size(); ++rk)
      block.row(static_cast<Index>(rk)) = d_fused.row(members[rk]);
    grads.push_back(g.features[o].transpose() * block);
  }
  return grads;
}

}  // namespace hcn
