#include "hcn/synthetic.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>

#include "hcn/rng.hpp"

namespace hcn {

namespace {

void check(const SyntheticConfig& c) {
  std::vector<std::string> bad;
  if (c.classes < 2) bad.push_back("classes must be >= 2");
  if (c.targets < c.classes) bad.push_back("targets must be >= classes");
  if (!(c.noise >= 0.0 && c.noise <= 1.0)) bad.push_back("noise must be in [0, 1]");
  if (c.variant == SyntheticConfig::Variant::shared_attr) {
    if (c.attrs_per_class < 1) bad.push_back("attrs-per-class must be >= 1");
    if (c.links_per_target < 1 || c.links_per_target > c.attrs_per_class)
      bad.push_back("links-per-target must be in [1, attrs-per-class]");
  } else {
    if (c.signals_per_class < 1) bad.push_back("signals-per-class must be >= 1");
  }
  if (c.train_per_class < 1 || c.val_per_class < 0)
    bad.push_back("train-per-class must be >= 1 and val-per-class >= 0");
  // Every class must keep at least one test node.
  const Index smallest = c.targets / c.classes;
  if (smallest <= c.train_per_class + c.val_per_class)
    bad.push_back("targets per class must exceed train-per-class + val-per-class");
  if (bad.empty()) return;
  std::string msg = "gen_synthetic: " + bad[0];
  for (std::size_t i = 1; i < bad.size(); ++i) msg += "; " + bad[i];
  throw std::invalid_argument(msg);
}

struct Builder {
  HeteroGraph g;

  int add_type(const std::string& name, bool implicit) {
    g.types.push_back({name, {}, implicit});
    return static_cast<int>(g.types.size()) - 1;
  }

  Index add_node(const std::string& id, int t) {
    const Index v = g.n++;
    g.node_ids.push_back(id);
    g.node_type.push_back(t);
    g.type_rank.push_back(static_cast<Index>(g.types[t].members.size()));
    g.types[t].members.push_back(v);
    return v;
  }

  void add_edge(Index a, Index b) {
    if (a > b) std::swap(a, b);
    g.edges.push_back({a, b});
    g.edge_kinds.emplace_back();
  }
};

void assign_labels_and_splits(Builder& b, const SyntheticConfig& c) {
  HeteroGraph& g = b.g;
  g.target_type = 0;
  for (int cls = 0; cls < c.classes; ++cls) g.class_names.push_back("c" + std::to_string(cls));
  g.labels.assign(g.n, -1);
  g.split.assign(g.n, Split::unlabeled);
  std::vector<Index> seen(c.classes, 0);
  for (Index t = 0; t < c.targets; ++t) {
    const int cls = static_cast<int>(t % c.classes);
    g.labels[t] = cls;
    const Index rank = seen[cls]++;
    g.split[t] = rank < c.train_per_class                    ? Split::train
                 : rank < c.train_per_class + c.val_per_class ? Split::val
                                                              : Split::test;
  }
}

HeteroGraph gen_shared_attr(const SyntheticConfig& c) {
  Builder b;
  const int item_t = b.add_type("item", false);
  const int attr_t = b.add_type("attr", true);
  for (Index t = 0; t < c.targets; ++t) b.add_node("i" + std::to_string(t), item_t);
  const Index attrs = static_cast<Index>(c.classes) * c.attrs_per_class;
  std::vector<Index> attr_node(attrs);
  for (Index a = 0; a < attrs; ++a) attr_node[a] = b.add_node("a" + std::to_string(a), attr_t);

  Rng rng(derive_seed(c.seed, "synthetic"));
  for (Index t = 0; t < c.targets; ++t) {
    const int cls = static_cast<int>(t % c.classes);
    std::set<Index> chosen;
    int attempts = 0;
    while (static_cast<int>(chosen.size()) < c.links_per_target && attempts++ < 1000) {
      int pool = cls;
      if (c.classes > 1 && rng.uniform() < c.noise) {
        const int shift = 1 + static_cast<int>(rng.bounded(c.classes - 1));
        pool = (cls + shift) % c.classes;
      }
      chosen.insert(attr_node[pool * c.attrs_per_class + rng.bounded(c.attrs_per_class)]);
    }
    for (Index a : chosen) b.add_edge(t, a);
  }

  b.g.features.push_back(Matrix::Constant(c.targets, 1, 1.0));
  b.g.features.push_back(Matrix::Identity(attrs, attrs));
  assign_labels_and_splits(b, c);
  return std::move(b.g);
}

HeteroGraph gen_chain(const SyntheticConfig& c) {
  Builder b;
  const int item_t = b.add_type("item", false);
  const int relay_t = b.add_type("relay", false);
  const int topic_t = b.add_type("topic", true);

  for (Index t = 0; t < c.targets; ++t) b.add_node("i" + std::to_string(t), item_t);

  // Two private relays per target plus one bridge relay per cross-class tie.
  const Index bridges = c.signals_per_class * (c.classes == 2 ? 1 : c.classes);
  const Index relays = 2 * c.targets + bridges;
  std::vector<Index> relay_node(relays);
  for (Index r = 0; r < relays; ++r) relay_node[r] = b.add_node("r" + std::to_string(r), relay_t);

  const Index topics = static_cast<Index>(c.classes) * c.signals_per_class;
  std::vector<Index> topic_node(topics);
  for (Index s = 0; s < topics; ++s) topic_node[s] = b.add_node("s" + std::to_string(s), topic_t);

  Rng rng(derive_seed(c.seed, "synthetic"));
  for (Index t = 0; t < c.targets; ++t) {
    const int cls = static_cast<int>(t % c.classes);
    const Index r1 = relay_node[2 * t];
    const Index r2 = relay_node[2 * t + 1];
    const Index s = topic_node[cls * c.signals_per_class + rng.bounded(c.signals_per_class)];
    b.add_edge(t, r1);
    b.add_edge(r1, r2);
    b.add_edge(r2, s);
  }
  // Tie topic i of each class to topic i of the next class through a relay,
  // so the wrong pool enters the picture only at distance 5 from a target.
  Index bridge = 2 * c.targets;
  for (int cls = 0; cls < (c.classes == 2 ? 1 : c.classes); ++cls) {
    for (Index i = 0; i < c.signals_per_class; ++i) {
      const Index sa = topic_node[cls * c.signals_per_class + i];
      const Index sb = topic_node[((cls + 1) % c.classes) * c.signals_per_class + i];
      b.add_edge(sa, relay_node[bridge]);
      b.add_edge(relay_node[bridge], sb);
      ++bridge;
    }
  }

  b.g.features.push_back(Matrix::Constant(c.targets, 1, 1.0));
  b.g.features.push_back(Matrix::Constant(relays, 1, 1.0));
  b.g.features.push_back(Matrix::Identity(topics, topics));
  assign_labels_and_splits(b, c);
  return std::move(b.g);
}

}  // namespace

HeteroGraph gen_synthetic(const SyntheticConfig& cfg) {
  check(cfg);
  return cfg.variant == SyntheticConfig::Variant::shared_attr ? gen_shared_attr(cfg)
                                                              : gen_chain(cfg);
}

}  // namespace hcn
