#include "hcn/experiments.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "hcn/linalg.hpp"

namespace hcn {

namespace {

std::string format_real(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::vector<int> gather_labels(const HeteroGraph& g, const std::vector<Index>& nodes) {
  std::vector<int> out;
  out.reserve(nodes.size());
  for (Index v : nodes) out.push_back(g.labels[v]);
  return out;
}

double mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double stdev(const std::vector<double>& xs, double mu) {
  if (xs.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : xs) s += (x - mu) * (x - mu);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

double ratio_percent(double value, double base) {
  if (base == 0.0) return value == 0.0 ? 100.0 : std::numeric_limits<double>::quiet_NaN();
  return 100.0 * (value / base);  // divide first so value == base is exactly 100
}

}  // namespace

RunMetrics evaluate_model(const HeteroGraph& g, const TrainedModel& m, int restarts,
                          std::uint64_t seed) {
  m.validate_against(g);
  const auto test_nodes = g.nodes_in_split(Split::test);
  if (test_nodes.empty()) throw std::invalid_argument("evaluate_model: test split is empty");

  RunMetrics r;
  r.classification = micro_macro_f1(predict(m, test_nodes), gather_labels(g, test_nodes));
  r.micro_f1 = r.classification.micro;
  r.macro_f1 = r.classification.macro;

  const auto cluster_nodes = g.labeled_nodes();
  const auto truth = gather_labels(g, cluster_nodes);
  const Matrix z = take_rows(m.embedding, cluster_nodes);
  const KMeansResult km = kmeans(z, g.num_classes(), restarts, derive_seed(seed, "cluster"));
  for (const auto& part : km.restarts) {
    r.nmi_runs.push_back(nmi(part, truth));
    r.ari_runs.push_back(ari(part, truth));
  }
  r.nmi_mean = mean(r.nmi_runs);
  r.ari_mean = mean(r.ari_runs);
  return r;
}

nlohmann::json metrics_json(const TrainedModel& m, const RunMetrics& r,
                            const std::vector<std::string>& class_names, double wall_ms) {
  nlohmann::json per_class = nlohmann::json::array();
  for (const auto& s : r.classification.per_class) {
    per_class.push_back({{"class", class_names[s.cls]},
                         {"precision", s.precision},
                         {"recall", s.recall},
                         {"f1", s.f1},
                         {"support", s.support}});
  }
  nlohmann::json history = {{"train_loss", nlohmann::json::array()},
                            {"val_loss", nlohmann::json::array()},
                            {"val_acc", nlohmann::json::array()}};
  for (const auto& h : m.history) {
    history["train_loss"].push_back(h.train_loss);
    history["val_loss"].push_back(h.val_loss);
    history["val_acc"].push_back(h.val_acc);
  }
  const TrainConfig& c = m.config;
  return {{"micro_f1", r.micro_f1},
          {"macro_f1", r.macro_f1},
          {"nmi", r.nmi_mean},
          {"ari", r.ari_mean},
          {"nmi_runs", r.nmi_runs},
          {"ari_runs", r.ari_runs},
          {"per_class", per_class},
          {"best_epoch", m.best_epoch},
          {"epochs_run", m.history.size()},
          {"history", history},
          {"config",
           {{"k", c.k},
            {"hidden", c.hidden},
            {"fused_dim", c.fused_dim},
            {"layers", c.layers},
            {"lr", c.lr},
            {"weight_decay", c.weight_decay},
            {"dropout", c.dropout},
            {"max_epochs", c.max_epochs},
            {"patience", c.patience},
            {"seed", c.seed},
            {"dilate_p", c.dilate_p},
            {"dilate_q", c.dilate_q}}},
          {"wall_clock_ms", wall_ms}};
}

std::vector<SweepRow> sweep_k(const HeteroGraph& g, const TrainConfig& base,
                              const std::vector<int>& ks, int restarts) {
  if (ks.empty()) throw std::invalid_argument("sweep_k: no k values");
  std::vector<SweepRow> rows;
  rows.reserve(ks.size());
  for (int k : ks) {
    TrainConfig cfg = base;
    cfg.k = k;
    const TrainedModel m =
        cfg.dilate_p > 0.0 ? train_with_dilation(g, cfg) : train(g, cfg);
    const RunMetrics r = evaluate_model(g, m, restarts, cfg.seed);
    rows.push_back({k, cfg.dilate_p, r.micro_f1, r.macro_f1, r.nmi_mean, r.ari_mean});
  }
  return rows;
}

std::vector<DilationRow> dilation_study(const HeteroGraph& g, const TrainConfig& base,
                                        const std::vector<double>& ps, int restarts,
                                        int trials) {
  if (ps.empty()) throw std::invalid_argument("dilation_study: no p values");
  if (trials < 1) throw std::invalid_argument("dilation_study: trials must be >= 1");

  auto run_at = [&](double p) {
    std::vector<double> micro, macro, nm, ar;
    for (int trial = 0; trial < trials; ++trial) {
      TrainConfig cfg = base;
      cfg.dilate_p = p;
      cfg.seed = derive_seed(base.seed, "trial", trial);
      const TrainedModel m = p > 0.0 ? train_with_dilation(g, cfg) : train(g, cfg);
      const RunMetrics r = evaluate_model(g, m, restarts, cfg.seed);
      micro.push_back(r.micro_f1);
      macro.push_back(r.macro_f1);
      nm.push_back(r.nmi_mean);
      ar.push_back(r.ari_mean);
    }
    return std::array<std::vector<double>, 4>{micro, macro, nm, ar};
  };

  const auto baseline = run_at(0.0);
  const double base_micro = mean(baseline[0]);
  const double base_macro = mean(baseline[1]);
  const double base_nmi = mean(baseline[2]);
  const double base_ari = mean(baseline[3]);

  std::vector<DilationRow> rows;
  rows.reserve(ps.size());
  for (double p : ps) {
    // p = 0 rows restate the baseline itself, so their relatives are exact.
    const auto vals = p == 0.0 ? baseline : run_at(p);
    DilationRow row;
    row.p = p;
    row.micro_f1 = mean(vals[0]);
    row.macro_f1 = mean(vals[1]);
    row.nmi = mean(vals[2]);
    row.ari = mean(vals[3]);
    row.micro_sd = stdev(vals[0], row.micro_f1);
    row.macro_sd = stdev(vals[1], row.macro_f1);
    row.nmi_sd = stdev(vals[2], row.nmi);
    row.ari_sd = stdev(vals[3], row.ari);
    row.rel_micro = ratio_percent(row.micro_f1, base_micro);
    row.rel_macro = ratio_percent(row.macro_f1, base_macro);
    row.rel_nmi = ratio_percent(row.nmi, base_nmi);
    row.rel_ari = ratio_percent(row.ari, base_ari);
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "k,p,micro_f1,macro_f1,nmi,ari\n";
  for (const auto& r : rows)
    out << r.k << ',' << format_real(r.p) << ',' << format_real(r.micro_f1) << ','
        << format_real(r.macro_f1) << ',' << format_real(r.nmi) << ',' << format_real(r.ari)
        << '\n';
  if (!out.flush()) throw std::runtime_error("write failed: " + path.string());
}

std::vector<SweepRow> dilation_absolute_rows(int k, const std::vector<DilationRow>& rows) {
  std::vector<SweepRow> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back({k, r.p, r.micro_f1, r.macro_f1, r.nmi, r.ari});
  return out;
}

std::vector<SweepRow> dilation_relative_rows(int k, const std::vector<DilationRow>& rows) {
  std::vector<SweepRow> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back({k, r.p, r.rel_micro, r.rel_macro, r.rel_nmi, r.rel_ari});
  return out;
}

}  // namespace hcn
