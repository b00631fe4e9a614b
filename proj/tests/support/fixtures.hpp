#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>
#include <utility>
#include <vector>

#include "hcn/graph.hpp"
#include "hcn/rng.hpp"
#include "hcn/types.hpp"

namespace fixtures {

inline std::filesystem::path fresh_dir(const std::string& tag) {
  static int counter = 0;
  auto dir = std::filesystem::temp_directory_path() /
             ("hcn_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc);
  out << content;
}

// Bibliographic toy: a1 co-writes p1..p5; a2/a3 co-write p1/p2 (published in
// c2) and a4 co-writes p3..p5 (published in c1). Everything is within two
// hops of a1.
inline hcn::GraphPaths toy_paths(const std::filesystem::path& dir) {
  write_file(dir / "nodes.tsv",
             "a1\tauthor\n"
             "a2\tauthor\n"
             "a3\tauthor\n"
             "a4\tauthor\n"
             "p1\tpaper\t1,0,0\n"
             "p2\tpaper\t0,1,0\n"
             "p3\tpaper\t0,0,1\n"
             "p4\tpaper\t0,0,1\n"
             "p5\tpaper\t0,0,1\n"
             "c1\tconf\n"
             "c2\tconf\n");
  write_file(dir / "edges.tsv",
             "a1\tp1\n"
             "a1\tp2\n"
             "a1\tp3\n"
             "a1\tp4\n"
             "a1\tp5\n"
             "a2\tp1\n"
             "a3\tp2\n"
             "a4\tp3\n"
             "a4\tp4\n"
             "a4\tp5\n"
             "p1\tc2\n"
             "p2\tc2\n"
             "p3\tc1\n"
             "p4\tc1\n"
             "p5\tc1\n");
  write_file(dir / "labels.tsv",
             "a1\tml\n"
             "a2\tnlp\n"
             "a3\tnlp\n"
             "a4\tml\n");
  write_file(dir / "splits.tsv",
             "a1\ttrain\n"
             "a2\ttrain\n"
             "a3\tval\n"
             "a4\ttest\n");
  return {dir / "nodes.tsv", dir / "edges.tsv", dir / "labels.tsv", dir / "splits.tsv"};
}

inline hcn::HeteroGraph toy_graph() {
  auto dir = fresh_dir("toy");
  return hcn::load_graph(toy_paths(dir));
}

// Random undirected simple graph as edge list.
struct RandomGraph {
  hcn::Index n = 0;
  std::vector<std::pair<hcn::Index, hcn::Index>> edges;
};

inline RandomGraph random_graph(hcn::Rng& rng, hcn::Index max_n, double max_density = 0.1) {
  RandomGraph g;
  g.n = 2 + rng.bounded(max_n - 1);
  const double density = max_density * rng.uniform();
  const auto want = static_cast<std::int64_t>(density * g.n * (g.n - 1) / 2.0);
  std::vector<std::vector<char>> have(g.n, std::vector<char>(g.n, 0));
  for (std::int64_t e = 0; e < want; ++e) {
    const hcn::Index a = rng.bounded(g.n);
    const hcn::Index b = rng.bounded(g.n);
    if (a == b || have[a][b]) continue;
    have[a][b] = have[b][a] = 1;
    g.edges.emplace_back(std::min(a, b), std::max(a, b));
  }
  return g;
}

inline std::vector<std::vector<hcn::Index>> adjacency_of(const RandomGraph& g) {
  std::vector<std::vector<hcn::Index>> adj(g.n);
  for (auto [a, b] : g.edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  return adj;
}

inline hcn::StrataMatrix a1_of(const RandomGraph& g) {
  std::vector<std::vector<std::int64_t>> rows(g.n);
  for (hcn::Index i = 0; i < g.n; ++i) rows[i].push_back(i);
  for (auto [a, b] : g.edges) {
    rows[a].push_back(b);
    rows[b].push_back(a);
  }
  hcn::StrataMatrix m;
  m.k = 1;
  m.n = g.n;
  m.row_ptr.assign(g.n + 1, 0);
  for (hcn::Index i = 0; i < g.n; ++i) {
    auto& r = rows[i];
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    m.row_ptr[i + 1] = m.row_ptr[i] + static_cast<std::int64_t>(r.size());
  }
  for (auto& r : rows) m.col.insert(m.col.end(), r.begin(), r.end());
  return m;
}

// Small two-type labeled graph for gradient checks: 4 "u" nodes with dense
// 2-wide features, 2 "v" nodes with 3-wide features, bipartite-ish edges.
inline hcn::HeteroGraph grad_fixture() {
  hcn::HeteroGraph g;
  g.types.push_back({"u", {0, 1, 2, 3}, false});
  g.types.push_back({"v", {4, 5}, false});
  g.n = 6;
  g.node_ids = {"u0", "u1", "u2", "u3", "v0", "v1"};
  g.node_type = {0, 0, 0, 0, 1, 1};
  g.type_rank = {0, 1, 2, 3, 0, 1};
  hcn::Matrix fu(4, 2);
  fu << 0.3, -1.2, 0.7, 0.25, -0.5, 1.1, 0.9, -0.8;
  hcn::Matrix fv(2, 3);
  fv << 1.0, -0.4, 0.2, -0.6, 0.8, 1.3;
  g.features = {fu, fv};
  g.edges = {{0, 4}, {1, 4}, {2, 5}, {3, 5}, {1, 5}};
  g.edge_kinds.assign(g.edges.size(), "");
  g.target_type = 0;
  g.class_names = {"x", "y"};
  g.labels = {0, 1, 0, 1, -1, -1};
  g.split = {hcn::Split::train, hcn::Split::train, hcn::Split::train, hcn::Split::val,
             hcn::Split::unlabeled, hcn::Split::unlabeled};
  return g;
}

}  // namespace fixtures
