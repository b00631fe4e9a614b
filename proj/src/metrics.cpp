#include "hcn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hcn/rng.hpp"

namespace hcn {

namespace {

void check_pair(const Partition& a, const Partition& b, const char* what) {
  if (a.empty() || a.size() != b.size())
    throw std::invalid_argument(std::string(what) + ": partitions must be nonempty and equal size");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] < 0 || b[i] < 0)
      throw std::invalid_argument(std::string(what) + ": negative cluster id");
}

int num_groups(const Partition& p) {
  int mx = -1;
  for (int v : p) mx = std::max(mx, v);
  return mx + 1;
}

// Contingency table plus marginals.
struct Contingency {
  std::vector<std::vector<std::int64_t>> cell;
  std::vector<std::int64_t> row;  // marginal of a
  std::vector<std::int64_t> col;  // marginal of b
  std::int64_t n = 0;
};

Contingency contingency(const Partition& a, const Partition& b) {
  Contingency t;
  const int ra = num_groups(a), rb = num_groups(b);
  t.cell.assign(ra, std::vector<std::int64_t>(rb, 0));
  t.row.assign(ra, 0);
  t.col.assign(rb, 0);
  t.n = static_cast<std::int64_t>(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++t.cell[a[i]][b[i]];
    ++t.row[a[i]];
    ++t.col[b[i]];
  }
  return t;
}

// Same grouping regardless of label names?
bool same_partition(const Contingency& t) {
  for (std::size_t i = 0; i < t.cell.size(); ++i)
    for (std::size_t j = 0; j < t.cell[i].size(); ++j)
      if (t.cell[i][j] != 0 && (t.cell[i][j] != t.row[i] || t.cell[i][j] != t.col[j]))
        return false;
  return true;
}

double comb2(double x) { return x * (x - 1.0) / 2.0; }

}  // namespace

F1Report micro_macro_f1(const Partition& pred, const Partition& truth) {
  check_pair(pred, truth, "micro_macro_f1");
  const int c = std::max(num_groups(pred), num_groups(truth));
  std::vector<std::int64_t> tp(c, 0), fp(c, 0), fn(c, 0), support(c, 0);
  std::int64_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    ++support[truth[i]];
    if (pred[i] == truth[i]) {
      ++tp[pred[i]];
      ++correct;
    } else {
      ++fp[pred[i]];
      ++fn[truth[i]];
    }
  }

  F1Report rep;
  rep.accuracy = static_cast<double>(correct) / static_cast<double>(pred.size());

  std::int64_t tp_sum = 0, fp_sum = 0, fn_sum = 0;
  double macro_sum = 0.0;
  int macro_n = 0;
  for (int cls = 0; cls < c; ++cls) {
    tp_sum += tp[cls];
    fp_sum += fp[cls];
    fn_sum += fn[cls];
    const std::int64_t predicted = tp[cls] + fp[cls];
    const std::int64_t actual = tp[cls] + fn[cls];
    if (predicted == 0 && actual == 0) continue;  // class absent from both sides
    ClassScore s;
    s.cls = cls;
    s.support = support[cls];
    s.precision = predicted ? static_cast<double>(tp[cls]) / predicted : 0.0;
    s.recall = actual ? static_cast<double>(tp[cls]) / actual : 0.0;
    s.f1 = (s.precision + s.recall) > 0.0
               ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
    rep.per_class.push_back(s);
    macro_sum += s.f1;
    ++macro_n;
  }

  const double micro_p = static_cast<double>(tp_sum) / static_cast<double>(tp_sum + fp_sum);
  const double micro_r = static_cast<double>(tp_sum) / static_cast<double>(tp_sum + fn_sum);
  rep.micro = (micro_p + micro_r) > 0.0 ? 2.0 * micro_p * micro_r / (micro_p + micro_r) : 0.0;
  rep.macro = macro_n ? macro_sum / macro_n : 0.0;

  // Single-label multiclass: micro F1 and accuracy are the same number.
  if (std::abs(rep.micro - rep.accuracy) > 1e-12)
    throw std::logic_error("micro_macro_f1: micro/accuracy identity violated");
  return rep;
}

double nmi(const Partition& a, const Partition& b) {
  check_pair(a, b, "nmi");
  const Contingency t = contingency(a, b);
  const double n = static_cast<double>(t.n);

  double ha = 0.0, hb = 0.0, mi = 0.0;
  for (std::int64_t ri : t.row)
    if (ri > 0) ha -= (ri / n) * std::log(ri / n);
  for (std::int64_t cj : t.col)
    if (cj > 0) hb -= (cj / n) * std::log(cj / n);
  for (std::size_t i = 0; i < t.cell.size(); ++i)
    for (std::size_t j = 0; j < t.cell[i].size(); ++j)
      if (t.cell[i][j] > 0) {
        const double nij = static_cast<double>(t.cell[i][j]);
        mi += (nij / n) * std::log(n * nij / (static_cast<double>(t.row[i]) * t.col[j]));
      }

  const double denom = 0.5 * (ha + hb);
  if (denom == 0.0) return same_partition(t) ? 1.0 : 0.0;
  return std::clamp(mi / denom, 0.0, 1.0);
}

double ari(const Partition& a, const Partition& b) {
  check_pair(a, b, "ari");
  const Contingency t = contingency(a, b);
  const double total = comb2(static_cast<double>(t.n));
  if (total == 0.0) return 1.0;  // a single point; trivially identical

  double sum_cells = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (const auto& row : t.cell)
    for (std::int64_t v : row) sum_cells += comb2(static_cast<double>(v));
  for (std::int64_t v : t.row) sum_a += comb2(static_cast<double>(v));
  for (std::int64_t v : t.col) sum_b += comb2(static_cast<double>(v));

  const double expected = sum_a * sum_b / total;
  const double maximum = 0.5 * (sum_a + sum_b);
  const double denom = maximum - expected;
  if (denom == 0.0) return same_partition(t) ? 1.0 : 0.0;
  return (sum_cells - expected) / denom;
}

KMeansResult kmeans(const Matrix& z, int k, int restarts, std::uint64_t seed) {
  const Index n = z.rows();
  if (k < 1 || k > n) throw std::invalid_argument("kmeans: k must be in [1, rows]");
  if (restarts < 1) throw std::invalid_argument("kmeans: restarts must be >= 1");

  KMeansResult res;
  res.wcss = std::numeric_limits<double>::infinity();

  for (int rep = 0; rep < restarts; ++rep) {
    Rng rng(derive_seed(seed, "kmeans", rep));
    // k distinct rows as initial centroids.
    std::vector<Index> perm(n);
    for (Index i = 0; i < n; ++i) perm[i] = i;
    for (int t = 0; t < k; ++t)
      std::swap(perm[t], perm[t + rng.bounded(n - t)]);
    Matrix cent(k, z.cols());
    for (int c = 0; c < k; ++c) cent.row(c) = z.row(perm[c]);

    Partition assign(n, -1);
    std::vector<double> own_dist(n, 0.0);
    std::vector<double> trace;
    double wcss = 0.0;

    for (int iter = 0; iter < 300; ++iter) {
      bool changed = false;
      wcss = 0.0;
      for (Index i = 0; i < n; ++i) {
        int best = 0;
        double best_d = (z.row(i) - cent.row(0)).squaredNorm();
        for (int c = 1; c < k; ++c) {
          const double d = (z.row(i) - cent.row(c)).squaredNorm();
          if (d < best_d) {
            best_d = d;
            best = c;
          }
        }
        if (assign[i] != best) {
          assign[i] = best;
          changed = true;
        }
        own_dist[i] = best_d;
        wcss += best_d;
      }
      trace.push_back(wcss);
      if (!changed && iter > 0) break;

      std::vector<std::int64_t> count(k, 0);
      cent.setZero();
      for (Index i = 0; i < n; ++i) {
        cent.row(assign[i]) += z.row(i);
        ++count[assign[i]];
      }
      bool reseeded = false;
      for (int c = 0; c < k; ++c) {
        if (count[c] > 0) {
          cent.row(c) /= static_cast<double>(count[c]);
        } else {
          // Reseed at the point farthest from its assigned centroid.
          Index far = 0;
          for (Index i = 1; i < n; ++i)
            if (own_dist[i] > own_dist[far]) far = i;
          cent.row(c) = z.row(far);
          own_dist[far] = 0.0;  // do not pick the same point for another empty cluster
          reseeded = true;
        }
      }
      if (reseeded) changed = true;
    }

    res.restarts.push_back(assign);
    res.wcss_trace.push_back(std::move(trace));
    if (wcss < res.wcss) {
      res.wcss = wcss;
      res.best = assign;
    }
  }
  return res;
}

}  // namespace hcn
