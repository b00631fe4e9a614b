#include "hcn/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

namespace hcn {

namespace {

// Iterates data lines of a TSV file, skipping blanks and '#' comments.
struct LineReader {
  std::filesystem::path file;
  std::ifstream in;
  std::int64_t line = 0;

  explicit LineReader(const std::filesystem::path& p) : file(p), in(p) {
    if (!in) throw std::runtime_error("cannot open " + p.string());
  }

  bool next(std::string& out) {
    while (std::getline(in, out)) {
      ++line;
      if (!out.empty() && out.back() == '\r') out.pop_back();
      if (out.empty() || out[0] == '#') continue;
      return true;
    }
    return false;
  }
};

std::vector<std::string_view> split_on(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

double parse_real(const LineReader& r, std::string_view token) {
  double v = 0.0;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw ParseError(r.file, r.line, "cannot parse feature value '" + std::string(token) + "'");
  return v;
}

std::string format_real(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

std::string_view split_name(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
    default: return "unlabeled";
  }
}

std::vector<Index> HeteroGraph::nodes_in_split(Split s) const {
  std::vector<Index> out;
  for (Index i = 0; i < n; ++i)
    if (split[i] == s) out.push_back(i);
  return out;
}

std::vector<Index> HeteroGraph::labeled_nodes() const {
  std::vector<Index> out;
  for (Index i = 0; i < n; ++i)
    if (labels[i] >= 0) out.push_back(i);
  return out;
}

std::vector<std::vector<Index>> HeteroGraph::adjacency() const {
  std::vector<std::vector<Index>> adj(n);
  for (const auto& e : edges) {
    adj[e[0]].push_back(e[1]);
    adj[e[1]].push_back(e[0]);
  }
  for (auto& nb : adj) std::sort(nb.begin(), nb.end());
  return adj;
}

bool StrataMatrix::contains(Index i, Index j) const {
  const auto r = row(i);
  return std::binary_search(r.begin(), r.end(), static_cast<std::int64_t>(j));
}

HeteroGraph load_graph(const GraphPaths& paths) {
  HeteroGraph g;
  std::unordered_map<std::string, Index> id_of;
  std::unordered_map<std::string, int> type_of;
  std::vector<std::vector<double>> raw_features;  // per node; empty = no column
  std::vector<bool> node_has_features;
  // Per type: -2 unseen, -1 featureless, >= 0 width.
  std::vector<std::int64_t> type_width;

  {
    LineReader r(paths.nodes);
    std::string s;
    while (r.next(s)) {
      auto f = split_on(s, '\t');
      if (f.size() < 2 || f[0].empty() || f[1].empty())
        throw ParseError(r.file, r.line, "expected node_id<TAB>node_type[<TAB>features]");
      std::string id(f[0]);
      if (id_of.count(id)) throw ParseError(r.file, r.line, "duplicate node id '" + id + "'");
      const Index v = g.n++;
      id_of.emplace(id, v);
      g.node_ids.push_back(std::move(id));

      std::string tname(f[1]);
      auto [it, fresh] = type_of.try_emplace(tname, static_cast<int>(g.types.size()));
      if (fresh) {
        g.types.push_back({tname, {}, false});
        type_width.push_back(-2);
      }
      const int t = it->second;
      g.node_type.push_back(t);
      g.type_rank.push_back(static_cast<Index>(g.types[t].members.size()));
      g.types[t].members.push_back(v);

      const bool has_feats = f.size() >= 3 && !f[2].empty();
      std::vector<double> row;
      if (has_feats)
        for (auto tok : split_on(f[2], ',')) row.push_back(parse_real(r, tok));
      const std::int64_t width = has_feats ? static_cast<std::int64_t>(row.size()) : -1;
      if (type_width[t] == -2) {
        type_width[t] = width;
      } else if (type_width[t] != width) {
        throw ParseError(r.file, r.line,
                         "feature width mismatch for type '" + tname + "': expected " +
                             (type_width[t] < 0 ? "no features" : std::to_string(type_width[t])) +
                             ", got " + (width < 0 ? "no features" : std::to_string(width)) +
                             " on node '" + g.node_ids.back() + "'");
      }
      node_has_features.push_back(has_feats);
      raw_features.push_back(std::move(row));
    }
  }

  // Assemble per-type feature blocks; featureless types get one-hot identity.
  g.features.resize(g.types.size());
  for (std::size_t t = 0; t < g.types.size(); ++t) {
    auto& type = g.types[t];
    const Index rows = static_cast<Index>(type.members.size());
    if (type_width[t] < 0) {
      type.implicit_features = true;
      g.features[t] = Matrix::Identity(rows, rows);
    } else {
      Matrix block(rows, type_width[t]);
      for (Index rk = 0; rk < rows; ++rk) {
        const auto& row = raw_features[type.members[rk]];
        for (Index c = 0; c < block.cols(); ++c) block(rk, c) = row[c];
      }
      g.features[t] = std::move(block);
    }
  }

  {
    LineReader r(paths.edges);
    std::string s;
    std::unordered_set<std::uint64_t> seen;
    while (r.next(s)) {
      auto f = split_on(s, '\t');
      if (f.size() < 2 || f[0].empty() || f[1].empty())
        throw ParseError(r.file, r.line, "expected src<TAB>dst[<TAB>edge_type]");
      auto resolve = [&](std::string_view tok) {
        auto it = id_of.find(std::string(tok));
        if (it == id_of.end())
          throw ParseError(r.file, r.line,
                           "edge references unknown node id '" + std::string(tok) + "'");
        return it->second;
      };
      Index a = resolve(f[0]);
      Index b = resolve(f[1]);
      if (a == b)
        throw ParseError(r.file, r.line, "self-loop edge on node '" + std::string(f[0]) + "'");
      if (a > b) std::swap(a, b);
      const std::uint64_t key =
          static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(g.n) +
          static_cast<std::uint64_t>(b);
      if (!seen.insert(key).second) continue;  // directed duplicate collapses
      g.edges.push_back({a, b});
      g.edge_kinds.emplace_back(f.size() >= 3 ? f[2] : std::string_view{});
    }
  }

  g.labels.assign(g.n, -1);
  g.split.assign(g.n, Split::unlabeled);

  if (paths.labels) {
    LineReader r(*paths.labels);
    std::string s;
    std::unordered_map<std::string, int> class_of;
    while (r.next(s)) {
      auto f = split_on(s, '\t');
      if (f.size() != 2 || f[0].empty() || f[1].empty())
        throw ParseError(r.file, r.line, "expected node_id<TAB>class_name");
      auto it = id_of.find(std::string(f[0]));
      if (it == id_of.end())
        throw ParseError(r.file, r.line, "label on unknown node id '" + std::string(f[0]) + "'");
      const Index v = it->second;
      if (g.labels[v] != -1)
        throw ParseError(r.file, r.line, "duplicate label for node '" + g.node_ids[v] + "'");
      if (g.target_type == -1) {
        g.target_type = g.node_type[v];
      } else if (g.node_type[v] != g.target_type) {
        throw ParseError(r.file, r.line,
                         "label on node '" + g.node_ids[v] + "' of type '" +
                             g.types[g.node_type[v]].name + "' but labels target type '" +
                             g.types[g.target_type].name + "'");
      }
      auto [cit, fresh] = class_of.try_emplace(std::string(f[1]),
                                               static_cast<int>(g.class_names.size()));
      if (fresh) g.class_names.emplace_back(f[1]);
      g.labels[v] = cit->second;
    }
  }

  if (paths.splits) {
    LineReader r(*paths.splits);
    std::string s;
    while (r.next(s)) {
      auto f = split_on(s, '\t');
      if (f.size() != 2 || f[0].empty() || f[1].empty())
        throw ParseError(r.file, r.line, "expected node_id<TAB>train|val|test");
      auto it = id_of.find(std::string(f[0]));
      if (it == id_of.end())
        throw ParseError(r.file, r.line, "split on unknown node id '" + std::string(f[0]) + "'");
      const Index v = it->second;
      if (g.labels[v] < 0)
        throw ParseError(r.file, r.line,
                         "split assigned to unlabeled node '" + g.node_ids[v] + "'");
      if (g.split[v] != Split::unlabeled)
        throw ParseError(r.file, r.line,
                         "overlapping split assignment for node '" + g.node_ids[v] + "'");
      Split sp;
      if (f[1] == "train") sp = Split::train;
      else if (f[1] == "val") sp = Split::val;
      else if (f[1] == "test") sp = Split::test;
      else
        throw ParseError(r.file, r.line,
                         "unknown split '" + std::string(f[1]) + "' (expected train|val|test)");
      g.split[v] = sp;
    }
  }

  return g;
}

void save_graph(const HeteroGraph& g, const GraphPaths& paths) {
  auto open = [](const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + p.string() + " for writing");
    return out;
  };

  {
    auto out = open(paths.nodes);
    for (Index v = 0; v < g.n; ++v) {
      const int t = g.node_type[v];
      out << g.node_ids[v] << '\t' << g.types[t].name;
      if (!g.types[t].implicit_features) {
        out << '\t';
        const auto row = g.features[t].row(g.type_rank[v]);
        for (Index c = 0; c < row.size(); ++c) {
          if (c) out << ',';
          out << format_real(row[c]);
        }
      }
      out << '\n';
    }
  }

  {
    auto out = open(paths.edges);
    bool any_kind = false;
    for (const auto& k : g.edge_kinds) any_kind |= !k.empty();
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      out << g.node_ids[g.edges[e][0]] << '\t' << g.node_ids[g.edges[e][1]];
      if (any_kind) out << '\t' << g.edge_kinds[e];
      out << '\n';
    }
  }

  if (paths.labels) {
    auto out = open(*paths.labels);
    for (Index v = 0; v < g.n; ++v)
      if (g.labels[v] >= 0) out << g.node_ids[v] << '\t' << g.class_names[g.labels[v]] << '\n';
  }

  if (paths.splits) {
    auto out = open(*paths.splits);
    for (Index v = 0; v < g.n; ++v)
      if (g.split[v] != Split::unlabeled)
        out << g.node_ids[v] << '\t' << split_name(g.split[v]) << '\n';
  }
}

StrataMatrix base_adjacency(const HeteroGraph& g) {
  std::vector<std::vector<std::int64_t>> rows(g.n);
  for (Index i = 0; i < g.n; ++i) rows[i].push_back(i);
  for (const auto& e : g.edges) {
    rows[e[0]].push_back(e[1]);
    rows[e[1]].push_back(e[0]);
  }
  StrataMatrix m;
  m.k = 1;
  m.n = g.n;
  m.row_ptr.assign(g.n + 1, 0);
  for (Index i = 0; i < g.n; ++i) {
    auto& r = rows[i];
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    m.row_ptr[i + 1] = m.row_ptr[i] + static_cast<std::int64_t>(r.size());
  }
  m.col.reserve(m.row_ptr[g.n]);
  for (auto& r : rows) m.col.insert(m.col.end(), r.begin(), r.end());
  return m;
}

}  // namespace hcn
