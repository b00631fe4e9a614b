#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hcn/experiments.hpp"
#include "hcn/graph.hpp"
#include "hcn/model.hpp"
#include "hcn/strata.hpp"
#include "hcn/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GraphFlags {
  std::string nodes, edges, labels, splits;

  hcn::GraphPaths paths() const {
    hcn::GraphPaths p{nodes, edges, std::nullopt, std::nullopt};
    if (!labels.empty()) p.labels = labels;
    if (!splits.empty()) p.splits = splits;
    return p;
  }
};

void add_graph_flags(CLI::App* cmd, GraphFlags& gf, bool labels_required) {
  cmd->add_option("--graph-nodes", gf.nodes, "Node table (id<TAB>type[<TAB>f1,f2,...])")
      ->required();
  cmd->add_option("--graph-edges", gf.edges, "Edge table (src<TAB>dst[<TAB>kind])")->required();
  auto* lab = cmd->add_option("--labels", gf.labels, "Label table (id<TAB>class)");
  auto* spl = cmd->add_option("--splits", gf.splits, "Split table (id<TAB>train|val|test)");
  if (labels_required) {
    lab->required();
    spl->required();
  }
}

void add_train_flags(CLI::App* cmd, hcn::TrainConfig& cfg, bool with_k = true) {
  if (with_k)
    cmd->add_option("--k", cfg.k, "Strata depth (max hop distance treated as adjacent)");
  cmd->add_option("--hidden", cfg.hidden, "Hidden layer width");
  cmd->add_option("--fused-dim", cfg.fused_dim, "Fused feature width (0 = same as hidden)");
  cmd->add_option("--layers", cfg.layers, "Number of graph convolution layers");
  cmd->add_option("--lr", cfg.lr, "Adam learning rate");
  cmd->add_option("--weight-decay", cfg.weight_decay, "L2 weight decay");
  cmd->add_option("--dropout", cfg.dropout, "Dropout rate on each layer input");
  cmd->add_option("--patience", cfg.patience, "Early stopping patience (epochs)");
  cmd->add_option("--max-epochs", cfg.max_epochs, "Epoch cap");
  cmd->add_option("--dilate-p", cfg.dilate_p, "Percent of strata pairs to re-drop (0 = off)");
  cmd->add_option("--dilate-q", cfg.dilate_q, "Epochs between re-drops");
  cmd->add_option("--seed", cfg.seed, "Root seed for init, dropout, dilation and k-means");
  cmd->set_config("--config", "", "Config file with key=value lines; flags take precedence");
}

// CLI11 only reads config files attached to the top-level app, so train-like
// subcommands apply theirs here: file values fill options not given as flags.
void apply_config(CLI::App* cmd) {
  const CLI::Option* copt = cmd->get_config_ptr();
  if (copt == nullptr || copt->count() == 0) return;
  const auto path = copt->as<std::string>();
  for (const CLI::ConfigItem& item : cmd->get_config_formatter()->from_file(path)) {
    if (item.name == "++" || item.name == "--") continue;
    if (!item.parents.empty())
      throw std::runtime_error("config sections are not supported (key '" + item.fullname() + "')");
    CLI::Option* op = cmd->get_option_no_throw("--" + item.name);
    if (op == nullptr) throw std::runtime_error("unknown config key '" + item.name + "'");
    if (op == copt || op->count() > 0) continue;
    for (const std::string& v : item.inputs) op->add_result(v);
    op->run_callback();
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out.flush()) throw std::runtime_error("write failed: " + path.string());
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

void print_sweep(const std::vector<hcn::SweepRow>& rows) {
  std::cout << "k\tp\tmicro_f1\tmacro_f1\tnmi\tari\n";
  for (const auto& r : rows)
    std::cout << r.k << '\t' << r.p << '\t' << r.micro_f1 << '\t' << r.macro_f1 << '\t' << r.nmi
              << '\t' << r.ari << '\n';
}

int cmd_build_strata(const GraphFlags& gf, int k, const std::string& out) {
  const hcn::HeteroGraph g = hcn::load_graph(gf.paths());
  const hcn::StrataMatrix ak = hcn::expand_strata(hcn::base_adjacency(g), k);
  hcn::write_strata_cache(out, ak);
  const double density =
      g.n ? static_cast<double>(ak.ones()) / (static_cast<double>(g.n) * g.n) : 0.0;
  std::cout << "strata cache written to " << out << ": n=" << g.n << " k=" << ak.k
            << " ones=" << ak.ones() << " density=" << density << "\n";
  return 0;
}

int cmd_train(const GraphFlags& gf, hcn::TrainConfig cfg, const std::string& cache_path,
              bool k_given, int restarts, const std::string& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  const hcn::HeteroGraph g = hcn::load_graph(gf.paths());

  hcn::StrataMatrix cache;
  const hcn::StrataMatrix* pre = nullptr;
  if (!cache_path.empty()) {
    cache = hcn::read_strata_cache(cache_path);
    if (k_given && cache.k != cfg.k)
      throw std::runtime_error("strata cache was built for k=" + std::to_string(cache.k) +
                               " but --k asks for " + std::to_string(cfg.k));
    cfg.k = cache.k;
    pre = &cache;
  }

  const hcn::TrainedModel model = cfg.dilate_p > 0.0 ? hcn::train_with_dilation(g, cfg, pre)
                                                     : hcn::train(g, cfg, pre);
  const hcn::RunMetrics run = hcn::evaluate_model(g, model, restarts, cfg.seed);

  fs::create_directories(out_dir);
  hcn::save_model(model, fs::path(out_dir) / "model.bin");
  hcn::export_embedding_tsv(model, g, fs::path(out_dir) / "embedding.tsv");
  const json report = hcn::metrics_json(model, run, g.class_names, elapsed_ms(t0));
  write_text(fs::path(out_dir) / "metrics.json", report.dump(2) + "\n");

  std::cout << "trained " << model.history.size() << " epochs (best " << model.best_epoch
            << "), test micro-F1 " << run.micro_f1 << " macro-F1 " << run.macro_f1 << ", nmi "
            << run.nmi_mean << " ari " << run.ari_mean << "\n"
            << "artifacts in " << out_dir << "\n";
  return 0;
}

int cmd_eval(const GraphFlags& gf, const std::string& model_path, const std::string& split,
             const std::string& out) {
  const hcn::HeteroGraph g = hcn::load_graph(gf.paths());
  const hcn::TrainedModel model = hcn::load_model(model_path);
  model.validate_against(g);

  hcn::Split s;
  if (split == "train") s = hcn::Split::train;
  else if (split == "val") s = hcn::Split::val;
  else if (split == "test") s = hcn::Split::test;
  else throw std::runtime_error("unknown split '" + split + "'");
  const auto nodes = g.nodes_in_split(s);
  if (nodes.empty()) throw std::runtime_error("split '" + split + "' is empty");

  std::vector<int> truth;
  truth.reserve(nodes.size());
  for (hcn::Index v : nodes) truth.push_back(g.labels[v]);
  const hcn::F1Report rep = hcn::micro_macro_f1(hcn::predict(model, nodes), truth);

  json per_class = json::array();
  for (const auto& c : rep.per_class)
    per_class.push_back({{"class", g.class_names[c.cls]},
                         {"precision", c.precision},
                         {"recall", c.recall},
                         {"f1", c.f1},
                         {"support", c.support}});
  const json report = {{"split", split},
                       {"nodes", nodes.size()},
                       {"micro_f1", rep.micro},
                       {"macro_f1", rep.macro},
                       {"accuracy", rep.accuracy},
                       {"per_class", per_class}};
  if (!out.empty()) write_text(out, report.dump(2) + "\n");
  std::cout << report.dump(2) << "\n";
  return 0;
}

int cmd_cluster(const GraphFlags& gf, const std::string& model_path, int restarts,
                std::uint64_t seed, const std::string& out) {
  const hcn::HeteroGraph g = hcn::load_graph(gf.paths());
  const hcn::TrainedModel model = hcn::load_model(model_path);
  model.validate_against(g);

  const auto nodes = g.labeled_nodes();
  if (nodes.empty()) throw std::runtime_error("no labeled nodes to cluster");
  std::vector<int> truth;
  truth.reserve(nodes.size());
  for (hcn::Index v : nodes) truth.push_back(g.labels[v]);

  hcn::Matrix z(static_cast<hcn::Index>(nodes.size()), model.embedding.cols());
  for (std::size_t i = 0; i < nodes.size(); ++i)
    z.row(static_cast<hcn::Index>(i)) = model.embedding.row(nodes[i]);

  const hcn::KMeansResult km =
      hcn::kmeans(z, g.num_classes(), restarts, hcn::derive_seed(seed, "cluster"));
  std::vector<double> nmis, aris;
  for (const auto& part : km.restarts) {
    nmis.push_back(hcn::nmi(part, truth));
    aris.push_back(hcn::ari(part, truth));
  }
  double nmi_mean = 0.0, ari_mean = 0.0;
  for (double v : nmis) nmi_mean += v;
  for (double v : aris) ari_mean += v;
  nmi_mean /= static_cast<double>(nmis.size());
  ari_mean /= static_cast<double>(aris.size());

  std::vector<std::int64_t> sizes(g.num_classes(), 0);
  for (int c : km.best) ++sizes[c];
  const json report = {{"nodes", nodes.size()},     {"clusters", g.num_classes()},
                       {"restarts", restarts},      {"nmi", nmi_mean},
                       {"ari", ari_mean},           {"nmi_runs", nmis},
                       {"ari_runs", aris},          {"best_wcss", km.wcss},
                       {"best_cluster_sizes", sizes}};
  if (!out.empty()) write_text(out, report.dump(2) + "\n");
  std::cout << report.dump(2) << "\n";
  return 0;
}

int cmd_sweep_k(const GraphFlags& gf, const hcn::TrainConfig& cfg, const std::vector<int>& ks,
                int restarts, const std::string& out_dir) {
  const hcn::HeteroGraph g = hcn::load_graph(gf.paths());
  const auto rows = hcn::sweep_k(g, cfg, ks, restarts);
  fs::create_directories(out_dir);
  hcn::write_sweep_csv(fs::path(out_dir) / "sweep_k.csv", rows);
  print_sweep(rows);
  std::cout << "wrote " << (fs::path(out_dir) / "sweep_k.csv").string() << "\n";
  return 0;
}

int cmd_sweep_dilation(const GraphFlags& gf, const hcn::TrainConfig& cfg,
                       const std::vector<double>& ps, int trials, int restarts,
                       const std::string& out_dir) {
  const hcn::HeteroGraph g = hcn::load_graph(gf.paths());
  const auto rows = hcn::dilation_study(g, cfg, ps, restarts, trials);
  fs::create_directories(out_dir);
  hcn::write_sweep_csv(fs::path(out_dir) / "sweep_dilation.csv",
                       hcn::dilation_absolute_rows(cfg.k, rows));
  hcn::write_sweep_csv(fs::path(out_dir) / "sweep_dilation_relative.csv",
                       hcn::dilation_relative_rows(cfg.k, rows));
  std::cout << "p\tmicro_f1\trel_micro%\tmacro_f1\trel_macro%\tnmi\trel_nmi%\tari\trel_ari%\n";
  for (const auto& r : rows)
    std::cout << r.p << '\t' << r.micro_f1 << '\t' << r.rel_micro << '\t' << r.macro_f1 << '\t'
              << r.rel_macro << '\t' << r.nmi << '\t' << r.rel_nmi << '\t' << r.ari << '\t'
              << r.rel_ari << '\n';
  std::cout << "wrote " << (fs::path(out_dir) / "sweep_dilation.csv").string() << " and "
            << (fs::path(out_dir) / "sweep_dilation_relative.csv").string() << "\n";
  return 0;
}

int cmd_gen_synthetic(const hcn::SyntheticConfig& cfg, const std::string& out_dir) {
  const hcn::HeteroGraph g = hcn::gen_synthetic(cfg);
  fs::create_directories(out_dir);
  const hcn::GraphPaths paths{fs::path(out_dir) / "nodes.tsv", fs::path(out_dir) / "edges.tsv",
                              fs::path(out_dir) / "labels.tsv", fs::path(out_dir) / "splits.tsv"};
  hcn::save_graph(g, paths);
  std::cout << "wrote " << g.n << " nodes, " << g.edges.size() << " edges, "
            << g.labeled_nodes().size() << " labels to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "hcn: heterogeneous graph embedding via k-strata graph convolution.\n"
      "Set HCN_THREADS to cap worker threads (0 or unset = all cores)."};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  int rc = 0;

  // build-strata
  {
    auto* cmd = app.add_subcommand("build-strata", "Build and cache the k-strata matrix");
    auto gf = std::make_shared<GraphFlags>();
    auto k = std::make_shared<int>(2);
    auto out = std::make_shared<std::string>();
    add_graph_flags(cmd, *gf, false);
    cmd->add_option("--k", *k, "Strata depth");
    cmd->add_option("--out", *out, "Cache file to write")->required();
    cmd->callback([&rc, gf, k, out] { rc = cmd_build_strata(*gf, *k, *out); });
  }

  // train
  {
    auto* cmd = app.add_subcommand("train", "Train a model and write its artifacts");
    auto gf = std::make_shared<GraphFlags>();
    auto cfg = std::make_shared<hcn::TrainConfig>();
    auto cache = std::make_shared<std::string>();
    auto restarts = std::make_shared<int>(10);
    auto out_dir = std::make_shared<std::string>();
    add_graph_flags(cmd, *gf, true);
    add_train_flags(cmd, *cfg);
    cmd->add_option("--strata-cache", *cache, "Reuse a cache from build-strata");
    cmd->add_option("--restarts", *restarts, "K-means restarts for the clustering metrics");
    cmd->add_option("--out-dir", *out_dir, "Directory for model.bin, embedding.tsv, metrics.json")
        ->required();
    cmd->callback([&rc, cmd, gf, cfg, cache, restarts, out_dir] {
      apply_config(cmd);
      rc = cmd_train(*gf, *cfg, *cache, cmd->count("--k") > 0, *restarts, *out_dir);
    });
  }

  // eval
  {
    auto* cmd = app.add_subcommand("eval", "Classification report for a trained model");
    auto gf = std::make_shared<GraphFlags>();
    auto model = std::make_shared<std::string>();
    auto split = std::make_shared<std::string>("test");
    auto out = std::make_shared<std::string>();
    add_graph_flags(cmd, *gf, true);
    cmd->add_option("--model", *model, "Checkpoint from train")->required();
    cmd->add_option("--split", *split, "Split to score")
        ->check(CLI::IsMember({"train", "val", "test"}));
    cmd->add_option("--out", *out, "Also write the report JSON here");
    cmd->callback([&rc, gf, model, split, out] { rc = cmd_eval(*gf, *model, *split, *out); });
  }

  // cluster
  {
    auto* cmd = app.add_subcommand("cluster", "K-means over the embedding of labeled nodes");
    auto gf = std::make_shared<GraphFlags>();
    auto model = std::make_shared<std::string>();
    auto restarts = std::make_shared<int>(10);
    auto seed = std::make_shared<std::uint64_t>(1);
    auto out = std::make_shared<std::string>();
    add_graph_flags(cmd, *gf, true);
    cmd->add_option("--model", *model, "Checkpoint from train")->required();
    cmd->add_option("--restarts", *restarts, "K-means restarts");
    cmd->add_option("--seed", *seed, "Seed for the k-means initializations");
    cmd->add_option("--out", *out, "Also write the report JSON here");
    cmd->callback([&rc, gf, model, restarts, seed, out] {
      rc = cmd_cluster(*gf, *model, *restarts, *seed, *out);
    });
  }

  // sweep-k
  {
    auto* cmd = app.add_subcommand("sweep-k", "Train and evaluate across strata depths");
    auto gf = std::make_shared<GraphFlags>();
    auto cfg = std::make_shared<hcn::TrainConfig>();
    auto ks = std::make_shared<std::vector<int>>();
    auto restarts = std::make_shared<int>(10);
    auto out_dir = std::make_shared<std::string>();
    add_graph_flags(cmd, *gf, true);
    add_train_flags(cmd, *cfg, /*with_k=*/false);
    cmd->add_option("--k", *ks, "Comma-separated strata depths, e.g. 1,2,3")
        ->required()
        ->delimiter(',');
    cmd->add_option("--restarts", *restarts, "K-means restarts for the clustering metrics");
    cmd->add_option("--out-dir", *out_dir, "Directory for sweep_k.csv")->required();
    cmd->callback([&rc, cmd, gf, cfg, ks, restarts, out_dir] {
      apply_config(cmd);
      rc = cmd_sweep_k(*gf, *cfg, *ks, *restarts, *out_dir);
    });
  }

  // sweep-dilation
  {
    auto* cmd = app.add_subcommand("sweep-dilation", "Dilation robustness study");
    auto gf = std::make_shared<GraphFlags>();
    auto cfg = std::make_shared<hcn::TrainConfig>();
    auto ps = std::make_shared<std::vector<double>>();
    auto trials = std::make_shared<int>(1);
    auto restarts = std::make_shared<int>(10);
    auto out_dir = std::make_shared<std::string>();
    add_graph_flags(cmd, *gf, true);
    add_train_flags(cmd, *cfg);
    cmd->add_option("--p", *ps, "Comma-separated drop percentages, e.g. 0,30,50")
        ->required()
        ->delimiter(',');
    cmd->add_option("--trials", *trials, "Seeds averaged per p value");
    cmd->add_option("--restarts", *restarts, "K-means restarts for the clustering metrics");
    cmd->add_option("--out-dir", *out_dir,
                    "Directory for sweep_dilation.csv and sweep_dilation_relative.csv")
        ->required();
    cmd->callback([&rc, cmd, gf, cfg, ps, trials, restarts, out_dir] {
      apply_config(cmd);
      rc = cmd_sweep_dilation(*gf, *cfg, *ps, *trials, *restarts, *out_dir);
    });
  }

  // gen-synthetic
  {
    auto* cmd = app.add_subcommand("gen-synthetic", "Write a planted-partition benchmark graph");
    auto cfg = std::make_shared<hcn::SyntheticConfig>();
    auto out_dir = std::make_shared<std::string>();
    std::map<std::string, hcn::SyntheticConfig::Variant> variants{
        {"shared-attr", hcn::SyntheticConfig::Variant::shared_attr},
        {"chain", hcn::SyntheticConfig::Variant::chain}};
    cmd->add_option("--variant", cfg->variant, "shared-attr: 1-hop signal; chain: 3-hop signal")
        ->transform(CLI::CheckedTransformer(variants, CLI::ignore_case));
    cmd->add_option("--targets", cfg->targets, "Labeled item nodes");
    cmd->add_option("--classes", cfg->classes, "Planted classes");
    cmd->add_option("--attrs-per-class", cfg->attrs_per_class, "Attribute pool per class");
    cmd->add_option("--links-per-target", cfg->links_per_target, "Attribute links per item");
    cmd->add_option("--noise", cfg->noise, "Cross-class link probability");
    cmd->add_option("--signals-per-class", cfg->signals_per_class, "Topic pool per class");
    cmd->add_option("--train-per-class", cfg->train_per_class, "Training nodes per class");
    cmd->add_option("--val-per-class", cfg->val_per_class, "Validation nodes per class");
    cmd->add_option("--seed", cfg->seed, "Generator seed");
    cmd->add_option("--out-dir", *out_dir, "Directory for the four TSV files")->required();
    cmd->callback([&rc, cfg, out_dir] { rc = cmd_gen_synthetic(*cfg, *out_dir); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
