#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hcn/types.hpp"

namespace hcn {

// Load/validation failure with file:line context and the offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::filesystem::path& file, std::int64_t line, const std::string& what)
      : std::runtime_error(file.string() + ":" + std::to_string(line) + ": " + what) {}
};

enum class Split : std::uint8_t { unlabeled = 0, train, val, test };

std::string_view split_name(Split s);

struct NodeType {
  std::string name;
  std::vector<Index> members;      // global node ids, file order
  bool implicit_features = false;  // no feature column in the input; one-hot assigned
};

struct HeteroGraph {
  Index n = 0;
  std::vector<std::string> node_ids;  // global order = file order
  std::vector<int> node_type;         // per node
  std::vector<Index> type_rank;       // row of the node inside its type's feature block
  std::vector<NodeType> types;
  std::vector<Matrix> features;       // per type, |members| x F_o

  std::vector<std::array<Index, 2>> edges;  // undirected, unique, canonical (lo, hi)
  std::vector<std::string> edge_kinds;      // parallel to edges; "" when absent

  int target_type = -1;  // type carrying labels; -1 if the graph is unlabeled
  std::vector<std::string> class_names;
  std::vector<int> labels;   // per node, -1 = unlabeled
  std::vector<Split> split;  // per node

  int num_classes() const { return static_cast<int>(class_names.size()); }
  std::vector<Index> nodes_in_split(Split s) const;
  std::vector<Index> labeled_nodes() const;
  // Sorted neighbor lists, no self loops.
  std::vector<std::vector<Index>> adjacency() const;
};

// Boolean k-strata indicator pattern: symmetric CSR with unit diagonal.
// Entry (i, j) present means the graph distance between i and j is <= k.
struct StrataMatrix {
  int k = 1;
  Index n = 0;
  std::vector<std::int64_t> row_ptr;  // n + 1
  std::vector<std::int64_t> col;      // sorted within each row

  std::span<const std::int64_t> row(Index i) const {
    return {col.data() + row_ptr[i], col.data() + row_ptr[i + 1]};
  }
  std::int64_t ones() const { return static_cast<std::int64_t>(col.size()); }
  std::int64_t offdiag_pairs() const { return (ones() - n) / 2; }
  bool contains(Index i, Index j) const;
  bool operator==(const StrataMatrix&) const = default;
};

struct GraphPaths {
  std::filesystem::path nodes;
  std::filesystem::path edges;
  std::optional<std::filesystem::path> labels;
  std::optional<std::filesystem::path> splits;
};

// TSV loader. nodes: id <TAB> type [<TAB> f1,f2,...]; edges: src <TAB> dst
// [<TAB> kind]; labels: id <TAB> class; splits: id <TAB> train|val|test.
// Lines starting with '#' and blank lines are skipped. Directed duplicates
// collapse onto one undirected edge. Types without a feature column get
// one-hot identity features.
HeteroGraph load_graph(const GraphPaths& paths);

// Inverse of load_graph; the written files load back to an equal graph,
// feature values bit for bit.
void save_graph(const HeteroGraph& g, const GraphPaths& paths);

// 1-stratum matrix: unit diagonal plus the symmetrized edge pattern.
StrataMatrix base_adjacency(const HeteroGraph& g);

}  // namespace hcn
