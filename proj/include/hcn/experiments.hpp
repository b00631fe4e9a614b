#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hcn/graph.hpp"
#include "hcn/metrics.hpp"
#include "hcn/model.hpp"

namespace hcn {

struct RunMetrics {
  F1Report classification;  // test split
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  double nmi_mean = 0.0;  // clustering scores averaged over k-means restarts
  double ari_mean = 0.0;
  std::vector<double> nmi_runs;
  std::vector<double> ari_runs;
};

// Classification on the test split plus k-means clustering of the embedding
// rows of every labeled node, scored against the labels.
RunMetrics evaluate_model(const HeteroGraph& g, const TrainedModel& m, int restarts,
                          std::uint64_t seed);

nlohmann::json metrics_json(const TrainedModel& m, const RunMetrics& r,
                            const std::vector<std::string>& class_names, double wall_ms);

struct SweepRow {
  int k = 0;
  double p = 0.0;
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  double nmi = 0.0;
  double ari = 0.0;
};

// Trains one model per k (same seed and settings otherwise) and evaluates it.
std::vector<SweepRow> sweep_k(const HeteroGraph& g, const TrainConfig& base,
                              const std::vector<int>& ks, int restarts);

struct DilationRow {
  double p = 0.0;
  // Means and standard deviations across trials.
  double micro_f1 = 0.0, macro_f1 = 0.0, nmi = 0.0, ari = 0.0;
  double micro_sd = 0.0, macro_sd = 0.0, nmi_sd = 0.0, ari_sd = 0.0;
  // Percentages relative to the p = 0 baseline run with the same seeds.
  double rel_micro = 0.0, rel_macro = 0.0, rel_nmi = 0.0, rel_ari = 0.0;
};

// For each p, trains with online dilation over `trials` derived seeds and
// reports absolute metrics plus percentages of the undilated baseline.
std::vector<DilationRow> dilation_study(const HeteroGraph& g, const TrainConfig& base,
                                        const std::vector<double>& ps, int restarts,
                                        int trials);

// Header is exactly: k,p,micro_f1,macro_f1,nmi,ari
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);

std::vector<SweepRow> dilation_absolute_rows(int k, const std::vector<DilationRow>& rows);
std::vector<SweepRow> dilation_relative_rows(int k, const std::vector<DilationRow>& rows);

}  // namespace hcn
