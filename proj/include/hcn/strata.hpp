#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "hcn/graph.hpp"
#include "hcn/types.hpp"

namespace hcn {

inline constexpr std::int64_t kUnreachable = -1;

// Exact hop counts from source; kUnreachable where no path exists.
std::vector<std::int64_t> bfs_distance(const std::vector<std::vector<Index>>& adj, Index source);
std::vector<std::int64_t> bfs_distance(const HeteroGraph& g, Index source);

// K-fold frontier expansion of a 1-stratum matrix: row i of the result holds
// every node within K hops of i. K = 1 returns the input unchanged.
StrataMatrix expand_strata(const StrataMatrix& a1, int k);

// Drops floor(p% of the off-diagonal symmetric pairs), both (i,j) and (j,i),
// chosen uniformly without replacement. The diagonal is never touched.
// p = 0 returns the input bit for bit.
StrataMatrix dilate(const StrataMatrix& ak, double drop_percent, std::uint64_t seed);

// Symmetric normalization: entry (i, j) becomes 1/sqrt(d_i d_j) where d is
// the boolean row sum. Pattern and symmetry are preserved exactly.
SpMat normalize(const StrataMatrix& ak);

void write_strata_cache(const std::filesystem::path& path, const StrataMatrix& m);
StrataMatrix read_strata_cache(const std::filesystem::path& path);

}  // namespace hcn
