#include "hcn/strata.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>

#include "hcn/binio.hpp"
#include "hcn/parallel.hpp"
#include "hcn/rng.hpp"

namespace hcn {

namespace {

constexpr char kStrataMagic[9] = "HCNSTRAT";
constexpr std::uint16_t kStrataVersion = 1;

StrataMatrix from_rows(int k, Index n, std::vector<std::vector<std::int64_t>>&& rows) {
  StrataMatrix m;
  m.k = k;
  m.n = n;
  m.row_ptr.assign(n + 1, 0);
  for (Index i = 0; i < n; ++i)
    m.row_ptr[i + 1] = m.row_ptr[i] + static_cast<std::int64_t>(rows[i].size());
  m.col.reserve(m.row_ptr[n]);
  for (auto& r : rows) m.col.insert(m.col.end(), r.begin(), r.end());
  return m;
}

}  // namespace

std::vector<std::int64_t> bfs_distance(const std::vector<std::vector<Index>>& adj, Index source) {
  const Index n = static_cast<Index>(adj.size());
  if (source < 0 || source >= n) throw std::invalid_argument("bfs_distance: source out of range");
  std::vector<std::int64_t> dist(n, kUnreachable);
  std::deque<Index> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const Index u = queue.front();
    queue.pop_front();
    for (Index v : adj[u])
      if (dist[v] == kUnreachable) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
  }
  return dist;
}

std::vector<std::int64_t> bfs_distance(const HeteroGraph& g, Index source) {
  return bfs_distance(g.adjacency(), source);
}

StrataMatrix expand_strata(const StrataMatrix& a1, int k) {
  if (k < 1) throw std::invalid_argument("expand_strata: k must be >= 1");
  if (a1.k != 1) throw std::invalid_argument("expand_strata: input must be a 1-stratum matrix");
  if (k == 1) return a1;

  const Index n = a1.n;
  std::vector<std::vector<std::int64_t>> rows(n);
  // Row-parallel level-limited BFS. The self-loops in a1 make each level
  // exactly one union step of the strata recurrence, so depth k reproduces
  // the distance <= k indicator.
  parallel_for(n, [&](std::int64_t i) {
    thread_local std::vector<std::int64_t> stamp;
    thread_local std::int64_t tick = 0;
    if (static_cast<Index>(stamp.size()) < n) stamp.assign(n, 0);
    ++tick;

    auto& members = rows[i];
    std::vector<std::int64_t> frontier{i}, next;
    stamp[i] = tick;
    members.push_back(i);
    for (int depth = 1; depth <= k && !frontier.empty(); ++depth) {
      next.clear();
      for (std::int64_t u : frontier)
        for (std::int64_t v : a1.row(u))
          if (stamp[v] != tick) {
            stamp[v] = tick;
            members.push_back(v);
            next.push_back(v);
          }
      frontier.swap(next);
    }
    std::sort(members.begin(), members.end());
  });

  return from_rows(k, n, std::move(rows));
}

StrataMatrix dilate(const StrataMatrix& ak, double drop_percent, std::uint64_t seed) {
  if (!(drop_percent >= 0.0 && drop_percent < 100.0))
    throw std::invalid_argument("dilate: drop percentage must be in [0, 100)");

  std::vector<std::pair<Index, Index>> pairs;
  pairs.reserve(ak.offdiag_pairs());
  for (Index i = 0; i < ak.n; ++i)
    for (std::int64_t j : ak.row(i))
      if (j > i) pairs.emplace_back(i, static_cast<Index>(j));

  const auto total = static_cast<std::int64_t>(pairs.size());
  const auto drop = static_cast<std::int64_t>(std::floor(total * (drop_percent / 100.0)));
  if (drop == 0) return ak;

  // Partial Fisher-Yates: the first `drop` slots become the removal set.
  Rng rng(seed);
  std::vector<std::int64_t> idx(total);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::int64_t t = 0; t < drop; ++t)
    std::swap(idx[t], idx[t + rng.bounded(total - t)]);

  std::vector<std::vector<std::int64_t>> removed(ak.n);
  for (std::int64_t t = 0; t < drop; ++t) {
    const auto [i, j] = pairs[idx[t]];
    removed[i].push_back(j);
    removed[j].push_back(i);
  }
  for (auto& r : removed) std::sort(r.begin(), r.end());

  std::vector<std::vector<std::int64_t>> rows(ak.n);
  for (Index i = 0; i < ak.n; ++i) {
    const auto full = ak.row(i);
    rows[i].reserve(full.size() - removed[i].size());
    std::set_difference(full.begin(), full.end(), removed[i].begin(), removed[i].end(),
                        std::back_inserter(rows[i]));
  }
  return from_rows(ak.k, ak.n, std::move(rows));
}

SpMat normalize(const StrataMatrix& ak) {
  const Index n = ak.n;
  std::vector<double> inv_sqrt(n);
  for (Index i = 0; i < n; ++i) {
    if (!ak.contains(i, i)) throw std::invalid_argument("normalize: missing diagonal entry");
    inv_sqrt[i] = 1.0 / std::sqrt(static_cast<double>(ak.row(i).size()));
  }
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(ak.ones());
  for (Index i = 0; i < n; ++i)
    for (std::int64_t j : ak.row(i))
      trips.emplace_back(static_cast<int>(i), static_cast<int>(j), inv_sqrt[i] * inv_sqrt[j]);
  SpMat a(n, n);
  a.setFromTriplets(trips.begin(), trips.end());
  a.makeCompressed();
  return a;
}

void write_strata_cache(const std::filesystem::path& path, const StrataMatrix& m) {
  io::Writer w(path);
  w.bytes(kStrataMagic, 8);
  w.u16(kStrataVersion);
  w.u64(static_cast<std::uint64_t>(m.n));
  w.u16(static_cast<std::uint16_t>(m.k));
  for (auto v : m.row_ptr) w.u64(static_cast<std::uint64_t>(v));
  for (auto v : m.col) w.u64(static_cast<std::uint64_t>(v));
  w.finish();
}

StrataMatrix read_strata_cache(const std::filesystem::path& path) {
  io::Reader r(path);
  r.expect_magic(kStrataMagic, "strata cache");
  const auto version = r.u16();
  if (version != kStrataVersion)
    throw std::runtime_error(path.string() + ": unsupported strata cache version " +
                             std::to_string(version));
  StrataMatrix m;
  m.n = static_cast<Index>(r.u64());
  m.k = static_cast<int>(r.u16());
  m.row_ptr.resize(m.n + 1);
  for (auto& v : m.row_ptr) v = static_cast<std::int64_t>(r.u64());
  m.col.resize(m.row_ptr[m.n]);
  for (auto& v : m.col) v = static_cast<std::int64_t>(r.u64());
  return m;
}

}  // namespace hcn
