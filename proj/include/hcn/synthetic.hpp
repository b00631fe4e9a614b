#pragma once

#include <cstdint>

#include "hcn/graph.hpp"

namespace hcn {

// Planted-partition heterogeneous graphs for sanity checks and benchmarks.
//
// shared_attr: labeled "item" nodes (constant scalar feature) link to "attr"
// nodes (one-hot features); each item draws its attributes from its own
// class's pool except with probability `noise`. The class signal sits one hop
// away, so it is already visible to a 1-strata model.
//
// chain: each item reaches its class's "topic" pool only through a private
// two-relay chain item-relay-relay-topic (all relays carry the same constant
// feature). The topic is 3 hops out: invisible to a 2-layer model on the
// 1-strata graph, trivially visible on the 2-strata graph. Each topic is also
// tied to a topic of the next class through one more relay, which puts the
// wrong class's pool inside the 5-strata neighborhood and degrades k = 5.
struct SyntheticConfig {
  enum class Variant { shared_attr, chain };
  Variant variant = Variant::shared_attr;
  Index targets = 200;
  int classes = 2;
  Index attrs_per_class = 40;   // shared_attr pool size
  int links_per_target = 6;     // shared_attr attribute draws
  double noise = 0.05;          // shared_attr cross-class link probability
  Index signals_per_class = 20; // chain pool size
  Index train_per_class = 30;
  Index val_per_class = 20;     // remainder of each class is the test split
  std::uint64_t seed = 1;
};

HeteroGraph gen_synthetic(const SyntheticConfig& cfg);

}  // namespace hcn
