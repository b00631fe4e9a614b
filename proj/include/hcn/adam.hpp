#pragma once

#include <cstdint>
#include <vector>

#include "hcn/types.hpp"

namespace hcn {

// Adam with classic (coupled) L2 weight decay: the decay term is added to the
// gradient before the moment updates.
struct AdamState {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
  std::int64_t t = 0;
  std::vector<Matrix> m;
  std::vector<Matrix> v;
};

AdamState make_adam(const std::vector<Matrix*>& params, double lr, double weight_decay);

void adam_step(const std::vector<Matrix*>& params, const std::vector<Matrix>& grads,
               AdamState& state);

}  // namespace hcn
