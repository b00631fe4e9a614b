#pragma once

#include <cstdint>
#include <vector>

#include "hcn/types.hpp"

namespace hcn {

using Partition = std::vector<int>;

struct ClassScore {
  int cls = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::int64_t support = 0;
};

struct F1Report {
  double micro = 0.0;
  double macro = 0.0;
  double accuracy = 0.0;
  std::vector<ClassScore> per_class;
};

// Single-label multiclass F1. Micro equals accuracy by construction (checked
// internally on every call). Macro averages F1 over classes present in the
// truth or the prediction; a class with zero precision+recall contributes 0.
F1Report micro_macro_f1(const Partition& pred, const Partition& truth);

// Normalized mutual information, arithmetic mean of the entropies in the
// denominator, natural logs. Both partitions single-cluster: 1 if identical
// as partitions, else 0.
double nmi(const Partition& a, const Partition& b);

// Adjusted Rand index (pair-counting form). Zero denominator: 1 if the
// partitions are identical up to relabeling, else 0.
double ari(const Partition& a, const Partition& b);

struct KMeansResult {
  Partition best;                        // assignment of the lowest-WCSS restart
  double wcss = 0.0;                     // its within-cluster sum of squares
  std::vector<Partition> restarts;       // assignment per restart
  std::vector<std::vector<double>> wcss_trace;  // per restart, per Lloyd iteration
};

// Lloyd's algorithm on the rows of z. Each restart draws k distinct rows as
// initial centroids from its own derived stream; empty clusters are reseeded
// at the point farthest from its assigned centroid. At most 300 iterations.
KMeansResult kmeans(const Matrix& z, int k, int restarts, std::uint64_t seed);

}  // namespace hcn
