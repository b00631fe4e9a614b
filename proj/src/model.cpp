#include "hcn/model.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "hcn/adam.hpp"
#include "hcn/autodiff.hpp"
#include "hcn/binio.hpp"
#include "hcn/linalg.hpp"
#include "hcn/strata.hpp"

namespace hcn {

namespace {

constexpr char kModelMagic[9] = "HCNMODEL";
constexpr std::uint16_t kModelVersion = 1;

std::string format_real(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

Matrix glorot_uniform(Index rows, Index cols, std::uint64_t seed) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Rng rng(seed);
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) m(r, c) = rng.uniform(-bound, bound);
  return m;
}

void write_matrix(io::Writer& w, const Matrix& m) {
  w.u64(static_cast<std::uint64_t>(m.rows()));
  w.u64(static_cast<std::uint64_t>(m.cols()));
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) w.f64(m(r, c));
}

Matrix read_matrix(io::Reader& r) {
  const Index rows = static_cast<Index>(r.u64());
  const Index cols = static_cast<Index>(r.u64());
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = r.f64();
  return m;
}

double accuracy_on(const Matrix& z, const std::vector<int>& labels,
                   const std::vector<Index>& nodes) {
  std::int64_t hit = 0;
  for (Index v : nodes) {
    int best = 0;
    for (Index c = 1; c < z.cols(); ++c)
      if (z(v, c) > z(v, best)) best = static_cast<int>(c);
    hit += best == labels[v];
  }
  return static_cast<double>(hit) / static_cast<double>(nodes.size());
}

TrainedModel train_impl(const HeteroGraph& g, const TrainConfig& cfg,
                        const StrataMatrix* precomputed) {
  cfg.validate();
  if (g.num_classes() < 2) throw std::invalid_argument("train: need at least two classes");
  const auto train_nodes = g.nodes_in_split(Split::train);
  if (train_nodes.empty()) throw std::invalid_argument("train: training split is empty");
  const auto val_nodes = g.nodes_in_split(Split::val);

  StrataMatrix ak;
  if (precomputed) {
    if (precomputed->n != g.n)
      throw std::invalid_argument("train: strata matrix size does not match graph");
    if (precomputed->k != cfg.k)
      throw std::invalid_argument("train: strata matrix was built for k=" +
                                  std::to_string(precomputed->k) + " but config asks for k=" +
                                  std::to_string(cfg.k));
    ak = *precomputed;
  } else {
    ak = expand_strata(base_adjacency(g), cfg.k);
  }
  SpMat adj = normalize(ak);

  const Index fdim = cfg.fused_dim > 0 ? cfg.fused_dim : cfg.hidden;
  const Index classes = g.num_classes();

  ModelParams params;
  params.dropout = cfg.dropout;
  params.fusion = init_transforms(g, fdim, cfg.seed);
  Index in_dim = fdim;
  for (int l = 0; l < cfg.layers; ++l) {
    const Index out_dim = l + 1 == cfg.layers ? classes : cfg.hidden;
    params.layers.push_back(glorot_uniform(in_dim, out_dim, derive_seed(cfg.seed, "layers", l)));
    in_dim = out_dim;
  }

  std::vector<Matrix*> trainable;
  for (auto& m : params.fusion.maps) trainable.push_back(&m);
  for (auto& w : params.layers) trainable.push_back(&w);
  AdamState opt = make_adam(trainable, cfg.lr, cfg.weight_decay);
  Rng drop_rng(derive_seed(cfg.seed, "dropout"));

  const bool dilating = cfg.dilate_p > 0.0;
  TrainedModel out;
  double best_val = std::numeric_limits<double>::infinity();
  ModelParams best_params = params;
  SpMat best_adj = adj;
  int redrops = 0;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    if (dilating && epoch % cfg.dilate_q == 0) {
      // Re-drop from the original pattern each time, never cumulatively.
      StrataMatrix dropped = dilate(ak, cfg.dilate_p, derive_seed(cfg.seed, "dilation", redrops));
      ++redrops;
      out.dilation_ones.push_back(dropped.ones());
      adj = normalize(dropped);
    }

    std::vector<Matrix> masks;
    std::vector<const Matrix*> mask_ptrs;
    if (cfg.dropout > 0.0) {
      masks.reserve(params.layers.size());
      Index rows_in = fdim;
      for (std::size_t l = 0; l < params.layers.size(); ++l) {
        masks.push_back(dropout_mask(g.n, rows_in, cfg.dropout, drop_rng));
        rows_in = params.layers[l].cols();
      }
      for (const auto& m : masks) mask_ptrs.push_back(&m);
    }

    StepGrads step = training_step(adj, g, params, train_nodes, mask_ptrs);
    if (!std::isfinite(step.loss))
      throw std::runtime_error("train: non-finite training loss at epoch " +
                               std::to_string(epoch));

    std::vector<Matrix> grads;
    grads.reserve(trainable.size());
    for (auto& m : step.d_fusion) grads.push_back(std::move(m));
    for (auto& m : step.d_layers) grads.push_back(std::move(m));
    adam_step(trainable, grads, opt);

    EpochStats stats;
    stats.train_loss = step.loss;
    Matrix z = forward(adj, fuse(g, params.fusion), params, false, nullptr);
    // Early stopping watches the validation loss of the updated parameters;
    // without a validation split the training loss stands in.
    double monitored;
    if (!val_nodes.empty()) {
      LossGrad lg = masked_cross_entropy(z, g.labels, val_nodes);
      stats.val_loss = lg.loss;
      stats.val_acc = accuracy_on(z, g.labels, val_nodes);
      monitored = lg.loss;
    } else {
      stats.val_loss = std::numeric_limits<double>::quiet_NaN();
      stats.val_acc = std::numeric_limits<double>::quiet_NaN();
      monitored = step.loss;
    }
    out.history.push_back(stats);

    if (monitored < best_val) {
      best_val = monitored;
      out.best_epoch = epoch;
      best_params = params;
      best_adj = adj;
    }
    if (epoch - out.best_epoch >= cfg.patience) break;
  }

  out.params = out.best_epoch >= 0 ? best_params : params;
  const SpMat& final_adj = out.best_epoch >= 0 ? best_adj : adj;
  out.embedding = forward(final_adj, fuse(g, out.params.fusion), out.params, false, nullptr);
  out.config = cfg;

  out.n = g.n;
  out.target_type = g.target_type;
  out.class_names = g.class_names;
  for (std::size_t t = 0; t < g.types.size(); ++t) {
    out.type_names.push_back(g.types[t].name);
    out.type_counts.push_back(static_cast<Index>(g.types[t].members.size()));
    out.type_dims.push_back(g.features[t].cols());
  }
  return out;
}

}  // namespace

void TrainConfig::validate() const {
  std::vector<std::string> bad;
  if (k < 1) bad.push_back("k must be >= 1");
  if (hidden < 1) bad.push_back("hidden must be >= 1");
  if (fused_dim < 0) bad.push_back("fused-dim must be >= 0");
  if (layers < 1) bad.push_back("layers must be >= 1");
  if (!(lr > 0.0)) bad.push_back("lr must be > 0");
  if (weight_decay < 0.0) bad.push_back("weight-decay must be >= 0");
  if (!(dropout >= 0.0 && dropout < 1.0)) bad.push_back("dropout must be in [0, 1)");
  if (max_epochs < 0) bad.push_back("max-epochs must be >= 0");
  if (patience < 1) bad.push_back("patience must be >= 1");
  if (!(dilate_p >= 0.0 && dilate_p < 100.0)) bad.push_back("dilate-p must be in [0, 100)");
  if (dilate_q < 1) bad.push_back("dilate-q must be >= 1");
  if (bad.empty()) return;
  std::string msg = "invalid config: " + bad[0];
  for (std::size_t i = 1; i < bad.size(); ++i) msg += "; " + bad[i];
  throw std::invalid_argument(msg);
}

void TrainedModel::validate_against(const HeteroGraph& g) const {
  std::vector<std::string> bad;
  if (g.n != n) bad.push_back("node count differs");
  if (g.target_type != target_type) bad.push_back("target type differs");
  if (g.class_names != class_names) bad.push_back("class names differ");
  if (g.types.size() != type_names.size()) {
    bad.push_back("type count differs");
  } else {
    for (std::size_t t = 0; t < g.types.size(); ++t) {
      if (g.types[t].name != type_names[t]) bad.push_back("type name differs at " + std::to_string(t));
      else if (static_cast<Index>(g.types[t].members.size()) != type_counts[t] ||
               g.features[t].cols() != type_dims[t])
        bad.push_back("type '" + type_names[t] + "' shape differs");
    }
  }
  if (bad.empty()) return;
  std::string msg = "checkpoint does not match graph: " + bad[0];
  for (std::size_t i = 1; i < bad.size(); ++i) msg += "; " + bad[i];
  throw std::runtime_error(msg);
}

Matrix forward(const SpMat& adj, const Matrix& fused, const ModelParams& p, bool training,
               Rng* rng) {
  if (p.layers.empty()) throw std::invalid_argument("forward: no layers");
  if (adj.rows() != adj.cols() || adj.rows() != fused.rows())
    throw std::invalid_argument("forward: adjacency and feature shapes do not match");
  if (training && p.dropout > 0.0 && rng == nullptr)
    throw std::invalid_argument("forward: training mode with dropout needs an rng");
  Matrix h = fused;
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    if (training && p.dropout > 0.0)
      h = h.cwiseProduct(dropout_mask(h.rows(), h.cols(), p.dropout, *rng));
    h = spmm(adj, h);
    h = matmul(h, p.layers[l]);
    if (l + 1 < p.layers.size()) h = relu(h);
  }
  return h;
}

StepGrads training_step(const SpMat& adj, const HeteroGraph& g, const ModelParams& p,
                        const std::vector<Index>& mask,
                        const std::vector<const Matrix*>& drop_masks) {
  if (!drop_masks.empty() && drop_masks.size() != p.layers.size())
    throw std::invalid_argument("training_step: need one dropout mask per layer");

  Matrix fused = fuse(g, p.fusion);
  Tape tape;
  const Tape::NodeId x = tape.leaf(std::move(fused));
  std::vector<Tape::NodeId> w_ids;
  Tape::NodeId h = x;
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    if (!drop_masks.empty()) h = tape.cwise_mul(h, *drop_masks[l]);
    h = tape.spmm(adj, h);
    const Tape::NodeId w = tape.leaf(p.layers[l]);
    w_ids.push_back(w);
    h = tape.matmul(h, w);
    if (l + 1 < p.layers.size()) h = tape.relu(h);
  }

  LossGrad lg = masked_cross_entropy(tape.value(h), g.labels, mask);
  std::vector<Matrix> adjoints = tape.backward(h, lg.dz);

  StepGrads out;
  out.loss = lg.loss;
  out.z = tape.value(h);
  out.d_fusion = fuse_backward(g, adjoints[x]);
  out.d_layers.reserve(w_ids.size());
  for (Tape::NodeId w : w_ids) out.d_layers.push_back(std::move(adjoints[w]));
  return out;
}

TrainedModel train(const HeteroGraph& g, const TrainConfig& cfg, const StrataMatrix* precomputed) {
  if (cfg.dilate_p != 0.0)
    throw std::invalid_argument("train: dilate-p must be 0; use train_with_dilation");
  return train_impl(g, cfg, precomputed);
}

TrainedModel train_with_dilation(const HeteroGraph& g, const TrainConfig& cfg,
                                 const StrataMatrix* precomputed) {
  return train_impl(g, cfg, precomputed);
}

std::vector<int> predict(const TrainedModel& m, const std::vector<Index>& nodes) {
  if (nodes.empty()) throw std::invalid_argument("predict: empty node set");
  std::vector<int> out;
  out.reserve(nodes.size());
  for (Index v : nodes) {
    if (v < 0 || v >= m.embedding.rows())
      throw std::invalid_argument("predict: node index out of range");
    int best = 0;
    for (Index c = 1; c < m.embedding.cols(); ++c)
      if (m.embedding(v, c) > m.embedding(v, best)) best = static_cast<int>(c);
    out.push_back(best);
  }
  return out;
}

void save_model(const TrainedModel& m, const std::filesystem::path& path) {
  io::Writer w(path);
  w.bytes(kModelMagic, 8);
  w.u16(kModelVersion);

  const TrainConfig& c = m.config;
  w.i64(c.k);
  w.i64(c.hidden);
  w.i64(c.fused_dim);
  w.i64(c.layers);
  w.f64(c.lr);
  w.f64(c.weight_decay);
  w.f64(c.dropout);
  w.i64(c.max_epochs);
  w.i64(c.patience);
  w.u64(c.seed);
  w.f64(c.dilate_p);
  w.i64(c.dilate_q);

  w.u64(static_cast<std::uint64_t>(m.n));
  w.i64(m.target_type);
  w.u64(m.type_names.size());
  for (std::size_t t = 0; t < m.type_names.size(); ++t) {
    w.str(m.type_names[t]);
    w.u64(static_cast<std::uint64_t>(m.type_counts[t]));
    w.u64(static_cast<std::uint64_t>(m.type_dims[t]));
  }
  w.u64(m.class_names.size());
  for (const auto& name : m.class_names) w.str(name);

  w.u64(static_cast<std::uint64_t>(m.params.fusion.out_dim));
  w.u64(m.params.fusion.maps.size());
  for (const auto& map : m.params.fusion.maps) write_matrix(w, map);
  w.u64(m.params.layers.size());
  for (const auto& layer : m.params.layers) write_matrix(w, layer);

  write_matrix(w, m.embedding);
  w.i64(m.best_epoch);
  w.u64(m.history.size());
  for (const auto& h : m.history) {
    w.f64(h.train_loss);
    w.f64(h.val_loss);
    w.f64(h.val_acc);
  }
  w.u64(m.dilation_ones.size());
  for (auto v : m.dilation_ones) w.i64(v);
  w.finish();
}

TrainedModel load_model(const std::filesystem::path& path) {
  io::Reader r(path);
  r.expect_magic(kModelMagic, "model checkpoint");
  const auto version = r.u16();
  if (version != kModelVersion)
    throw std::runtime_error(path.string() + ": unsupported checkpoint version " +
                             std::to_string(version));

  TrainedModel m;
  TrainConfig& c = m.config;
  c.k = static_cast<int>(r.i64());
  c.hidden = static_cast<Index>(r.i64());
  c.fused_dim = static_cast<Index>(r.i64());
  c.layers = static_cast<int>(r.i64());
  c.lr = r.f64();
  c.weight_decay = r.f64();
  c.dropout = r.f64();
  c.max_epochs = static_cast<int>(r.i64());
  c.patience = static_cast<int>(r.i64());
  c.seed = r.u64();
  c.dilate_p = r.f64();
  c.dilate_q = static_cast<int>(r.i64());

  m.n = static_cast<Index>(r.u64());
  m.target_type = static_cast<int>(r.i64());
  const auto ntypes = r.u64();
  for (std::uint64_t t = 0; t < ntypes; ++t) {
    m.type_names.push_back(r.str());
    m.type_counts.push_back(static_cast<Index>(r.u64()));
    m.type_dims.push_back(static_cast<Index>(r.u64()));
  }
  const auto nclasses = r.u64();
  for (std::uint64_t i = 0; i < nclasses; ++i) m.class_names.push_back(r.str());

  m.params.dropout = c.dropout;
  m.params.fusion.out_dim = static_cast<Index>(r.u64());
  const auto nmaps = r.u64();
  for (std::uint64_t i = 0; i < nmaps; ++i) m.params.fusion.maps.push_back(read_matrix(r));
  const auto nlayers = r.u64();
  for (std::uint64_t i = 0; i < nlayers; ++i) m.params.layers.push_back(read_matrix(r));

  m.embedding = read_matrix(r);
  m.best_epoch = static_cast<int>(r.i64());
  const auto hist = r.u64();
  for (std::uint64_t i = 0; i < hist; ++i) {
    EpochStats s;
    s.train_loss = r.f64();
    s.val_loss = r.f64();
    s.val_acc = r.f64();
    m.history.push_back(s);
  }
  const auto ndrops = r.u64();
  for (std::uint64_t i = 0; i < ndrops; ++i) m.dilation_ones.push_back(r.i64());
  return m;
}

void export_embedding_tsv(const TrainedModel& m, const HeteroGraph& g,
                          const std::filesystem::path& path) {
  m.validate_against(g);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (Index v = 0; v < m.embedding.rows(); ++v) {
    out << g.node_ids[v];
    for (Index c = 0; c < m.embedding.cols(); ++c) out << '\t' << format_real(m.embedding(v, c));
    out << '\n';
  }
}

}  // namespace hcn
