#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "hcn/fusion.hpp"
#include "hcn/graph.hpp"
#include "hcn/rng.hpp"
#include "hcn/types.hpp"

namespace hcn {

struct ModelParams {
  TypeTransforms fusion;
  std::vector<Matrix> layers;  // W^0 .. W^{L-1}; last maps to class logits
  double dropout = 0.5;
};

struct TrainConfig {
  int k = 2;
  Index hidden = 64;
  Index fused_dim = 0;  // 0 means: same as hidden
  int layers = 2;
  double lr = 0.01;
  double weight_decay = 5e-4;
  double dropout = 0.5;
  int max_epochs = 300;
  int patience = 100;
  std::uint64_t seed = 1;
  double dilate_p = 0.0;  // percent of off-diagonal pairs to re-drop
  int dilate_q = 20;      // re-drop period in epochs

  // Throws std::invalid_argument listing every violated constraint at once.
  void validate() const;
};

struct EpochStats {
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_acc = 0.0;
};

struct TrainedModel {
  ModelParams params;
  Matrix embedding;  // n x C logits from the best parameters
  std::vector<EpochStats> history;
  int best_epoch = -1;
  TrainConfig config;
  // Per re-drop total ones of the dilated matrix (empty when dilate_p = 0).
  std::vector<std::int64_t> dilation_ones;

  // Graph fingerprint, checked when the checkpoint is reused for eval.
  Index n = 0;
  int target_type = -1;
  std::vector<std::string> class_names;
  std::vector<std::string> type_names;
  std::vector<Index> type_counts;
  std::vector<Index> type_dims;

  void validate_against(const HeteroGraph& g) const;
};

// One full pass through the network. training = true applies inverted dropout
// to every layer input and requires an rng; eval mode is deterministic.
Matrix forward(const SpMat& adj, const Matrix& fused, const ModelParams& p, bool training,
               Rng* rng);

struct StepGrads {
  double loss = 0.0;
  Matrix z;
  std::vector<Matrix> d_fusion;  // per type
  std::vector<Matrix> d_layers;  // per layer
};

// Loss and analytic gradients of one training step: fuse, propagate, masked
// cross entropy. drop_masks is empty (no dropout) or one factor matrix per
// layer input.
StepGrads training_step(const SpMat& adj, const HeteroGraph& g, const ModelParams& p,
                        const std::vector<Index>& mask,
                        const std::vector<const Matrix*>& drop_masks);

// Full training loop: strata expansion, normalization, Adam, early stopping
// on validation loss, parameters restored from the best epoch. A precomputed
// strata matrix may be passed to skip expansion.
TrainedModel train(const HeteroGraph& g, const TrainConfig& cfg,
                   const StrataMatrix* precomputed = nullptr);

// Same loop with online dilation: every q epochs the propagation matrix is
// rebuilt from a fresh p% drop of the original k-strata pattern (draws are
// from the original each time, not cumulative). With p = 0 this is exactly
// train().
TrainedModel train_with_dilation(const HeteroGraph& g, const TrainConfig& cfg,
                                 const StrataMatrix* precomputed = nullptr);

// Argmax over the embedding rows of the given nodes; ties break toward the
// lower class index.
std::vector<int> predict(const TrainedModel& m, const std::vector<Index>& nodes);

void save_model(const TrainedModel& m, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

// node_id <TAB> tab-separated logits, one row per node, shortest
// round-tripping decimal form. The graph supplies the node ids.
void export_embedding_tsv(const TrainedModel& m, const HeteroGraph& g,
                          const std::filesystem::path& path);

}  // namespace hcn
