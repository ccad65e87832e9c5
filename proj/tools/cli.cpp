#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "navseg/clustering.hpp"
#include "navseg/corpus.hpp"
#include "navseg/errors.hpp"
#include "navseg/evaluation.hpp"
#include "navseg/features.hpp"
#include "navseg/pipeline.hpp"
#include "navseg/svm.hpp"

namespace navseg::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

const std::vector<std::string> kAlgorithms = {"chd", "chd-hd", "agglo", "dbscan", "kmeans"};

struct Options {
  std::string algo = "chd-hd";
  double beta = 1.0;
  double gamma = 1.0;
  double epsilon = 1e-10;
  double sigma = 2.0;
  double c = 1.0;
  double rbf_gamma = 0.1;
  std::uint64_t seed = 7;
  std::size_t k = 0;
  unsigned jobs = 1;
  bool strict = false;

  std::string page;
  std::string corpus;
  std::string model;
  std::string out;
  std::string report;
  std::string table;
  std::string dump_partition;
  std::string dump_features;
  bool links_only = false;
  bool all_pages = false;
  std::string fractions;
  unsigned repetitions = 5;
  std::uint32_t pages = 20;
  std::string variant = "standard";
  std::string id_prefix;
  std::map<std::string, std::vector<std::uint32_t>> ranges;
};

PipelineConfig pipeline_config(const Options& o) {
  PipelineConfig cfg;
  cfg.algorithm = parse_algorithm(o.algo);
  cfg.clustering.beta = o.beta;
  cfg.clustering.gamma = o.gamma;
  cfg.clustering.epsilon = o.epsilon;
  cfg.smoothing.sigma = o.sigma;
  cfg.svm.c = o.c;
  cfg.svm.rbf_gamma = o.rbf_gamma;
  cfg.kmeans_k = o.k;
  cfg.seed = o.seed;
  cfg.jobs = std::max(1u, o.jobs);
  cfg.validate();
  return cfg;
}

ParseOptions parse_options(const Options& o) {
  ParseOptions p;
  p.decode = o.strict ? DecodePolicy::kStrict : DecodePolicy::kLossy;
  return p;
}

std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  f << text;
  if (!f) throw Error("failed writing " + path);
}

std::string num(double v, const char* format = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::string partition_text(const BlockPartition& p) {
  std::string s;
  for (const Block& b : p.blocks) {
    for (std::size_t i = 0; i < b.size(); ++i) s += (i ? "," : "") + std::to_string(b[i]);
    s += "\n";
  }
  return s;
}

std::string features_csv(const std::vector<BlockFeatures>& feats) {
  std::string s = "block_id,count,text_mean,text_var\n";
  for (std::size_t i = 0; i < feats.size(); ++i)
    s += std::to_string(i) + "," + std::to_string(feats[i].count) + "," + num(feats[i].text_mean) + "," +
         num(feats[i].text_var) + "\n";
  return s;
}

std::string preview(std::string_view text, std::size_t limit = 40) {
  std::string s;
  for (char c : text) s.push_back(c == '\n' || c == '\t' || c == '\r' ? ' ' : c);
  if (s.size() > limit) s = s.substr(0, limit) + "...";
  return s;
}

// --------------------------------------------------------------------------

int cmd_parse(const Options& o, std::ostream& out) {
  IndexedDom dom = parse_page(read_bytes(o.page), parse_options(o));
  PipelineConfig cfg = pipeline_config(o);
  ClusteringConfig cc = resolve_thresholds(dom, cfg.clustering);
  out << "# nodes=" << dom.size() << " hyperlinks=" << dom.hyperlinks().size() << " gt=" << cc.gt
      << " hdt=" << num(cc.hdt) << "\n";
  if (o.links_only) {
    for (const auto& h : dom.hyperlinks())
      out << h.index << "\t" << h.anchor_words << "\t" << h.href << "\t"
          << preview(dom.text_content(NodeId{h.index}), 60) << "\n";
    return kOk;
  }
  for (const DomNode& n : dom.nodes()) {
    out << n.index << "\t" << n.subtree_end << "\t" << std::string(2 * n.depth, ' ');
    switch (n.kind) {
      case NodeKind::kElement:
        out << n.tag;
        if (const std::string* href = n.attribute("href"); href && n.tag == "a")
          out << " href=\"" << *href << "\"";
        break;
      case NodeKind::kText:
        out << "#text \"" << preview(n.text) << "\" words=" << n.own_text_words;
        break;
      case NodeKind::kComment:
        out << "#comment";
        break;
    }
    out << "\n";
  }
  return kOk;
}

int cmd_cluster(const Options& o, std::ostream& out) {
  IndexedDom dom = parse_page(read_bytes(o.page), parse_options(o));
  out << partition_text(cluster_page(dom, pipeline_config(o)));
  return kOk;
}

int cmd_features(const Options& o, std::ostream& out) {
  IndexedDom dom = parse_page(read_bytes(o.page), parse_options(o));
  PipelineConfig cfg = pipeline_config(o);
  BlockPartition p = cluster_page(dom, cfg);
  if (!o.dump_partition.empty()) write_text(o.dump_partition, partition_text(p), out);
  out << features_csv(block_features(dom, p, cfg.smoothing));
  return kOk;
}

LoadOptions load_options(const Options& o) {
  LoadOptions l;
  l.jobs = std::max(1u, o.jobs);
  l.parse = parse_options(o);
  return l;
}

int cmd_train(const Options& o, std::ostream& out) {
  PipelineConfig cfg = pipeline_config(o);
  Corpus corpus = load_corpus(o.corpus, load_options(o));
  std::vector<std::string> ids;
  if (o.all_pages) {
    for (const auto& p : corpus.pages) ids.push_back(p.record.page_id);
  } else {
    ids = split_corpus(corpus, cfg.seed).train_ids;
  }
  std::vector<LabelledBlock> blocks = collect_blocks(corpus, ids, cfg);
  SvmModel model = train_on_blocks(blocks, cfg.svm);
  save_model(model, o.out);
  if (!o.dump_features.empty()) {
    std::string csv = "page_id,first_index,count,text_mean,text_var,nav\n";
    for (const auto& b : blocks)
      csv += b.page_id + "," + std::to_string(b.links.front()) + "," + std::to_string(b.features.count) + "," +
             num(b.features.text_mean) + "," + num(b.features.text_var) + "," + (b.nav ? "1" : "0") + "\n";
    write_text(o.dump_features, csv, out);
  }
  std::size_t nav = std::count_if(blocks.begin(), blocks.end(), [](const auto& b) { return b.nav; });
  out << "trained on " << blocks.size() << " blocks (" << nav << " navigation) from " << ids.size()
      << " pages; " << model.support_vectors.size() << " support vectors; wrote " << o.out << "\n";
  return kOk;
}

int cmd_extract(const Options& o, std::ostream& out) {
  SvmModel model = load_model(o.model);
  PipelineConfig cfg = pipeline_config(o);
  IndexedDom dom = parse_page(read_bytes(o.page), parse_options(o));
  BlockPartition partition = cluster_page(dom, cfg);
  std::vector<ClassifiedBlock> blocks = classify_page(dom, partition, model, cfg.smoothing);
  ordered_json doc;
  doc["format"] = "navseg-extraction";
  doc["version"] = 1;
  doc["page"] = fs::path(o.page).filename().string();
  doc["algorithm"] = algorithm_name(cfg.algorithm);
  doc["hyperlinks"] = dom.hyperlinks().size();
  ordered_json nav = ordered_json::array();
  for (const auto& b : blocks) {
    if (!b.prediction.nav) continue;
    ordered_json links = ordered_json::array();
    for (std::uint32_t idx : b.links) {
      const HyperlinkRef* h = dom.hyperlink_at(idx);
      links.push_back({{"index", idx}, {"href", h ? h->href : ""}, {"anchor_text", dom.text_content(NodeId{idx})}});
    }
    nav.push_back({{"block_id", b.block_id}, {"decision_value", b.prediction.decision_value},
                   {"links", std::move(links)}});
  }
  doc["navigation_blocks"] = std::move(nav);
  write_text(o.out, doc.dump(2) + "\n", out);
  return kOk;
}

void dump_pages(const Options& o, const Corpus& corpus, const PipelineConfig& cfg,
                const std::vector<std::string>& ids, const std::vector<BlockPartition>& parts) {
  if (!o.dump_partition.empty()) {
    fs::create_directories(o.dump_partition);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      std::ofstream f(fs::path(o.dump_partition) / (ids[i] + ".partition"), std::ios::binary);
      f << partition_text(parts[i]);
    }
  }
  if (!o.dump_features.empty()) {
    fs::create_directories(o.dump_features);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      std::ofstream f(fs::path(o.dump_features) / (ids[i] + ".features.csv"), std::ios::binary);
      f << features_csv(block_features(corpus.find(ids[i])->dom, parts[i], cfg.smoothing));
    }
  }
}

int cmd_eval(const Options& o, std::ostream& out) {
  PipelineConfig cfg = pipeline_config(o);
  Corpus corpus = load_corpus(o.corpus, load_options(o));
  CorpusReport report;
  std::vector<BlockPartition> parts;
  SplitSpec split = split_corpus(corpus, cfg.seed);
  if (!o.model.empty()) {
    SvmModel model = load_model(o.model);
    report = evaluate_pages(corpus, split.test_ids, model, cfg, &parts);
    report.metadata = report_metadata(corpus, cfg, split);
    report.metadata.emplace_back("model", fs::path(o.model).filename().string());
  } else {
    EvaluationRun run = run_evaluation(corpus, cfg);
    report = std::move(run.report);
    parts = std::move(run.test_partitions);
  }
  dump_pages(o, corpus, cfg, split.test_ids, parts);
  if (!o.report.empty()) write_text(o.report, report_to_json(report), out);
  if (!o.table.empty()) write_text(o.table, report_to_table(report), out);
  if (o.report.empty() && o.table.empty()) out << report_to_table(report);
  return kOk;
}

std::vector<double> parse_fractions(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ContractViolation("--fractions: '" + item + "' is not a number");
    }
  }
  return out;
}

int cmd_learning_curve(const Options& o, std::ostream& out) {
  PipelineConfig cfg = pipeline_config(o);
  Corpus corpus = load_corpus(o.corpus, load_options(o));
  CurveConfig curve;
  if (!o.fractions.empty()) curve.fractions = parse_fractions(o.fractions);
  curve.repetitions = o.repetitions;
  std::vector<CurvePoint> points = learning_curve(corpus, cfg, curve);
  write_text(o.out, curve_to_csv(points), out);
  return kOk;
}

int cmd_gen_corpus(const Options& o, std::ostream& out) {
  GeneratorSpec spec = o.variant == "prose" ? prose_heavy_spec() : GeneratorSpec{};
  spec.pages = o.pages;
  if (!o.id_prefix.empty()) spec.id_prefix = o.id_prefix;
  const std::pair<const char*, CountRange*> fields[] = {
      {"menus", &spec.menus},
      {"lists", &spec.lists},
      {"links-per-block", &spec.links_per_block},
      {"paragraphs", &spec.content_paragraphs},
      {"links-per-paragraph", &spec.links_per_paragraph},
      {"ads", &spec.ads},
      {"prose-words", &spec.prose_words},
      {"spacer-paragraphs", &spec.spacer_paragraphs}};
  for (const auto& [name, range] : fields)
    if (auto it = o.ranges.find(name); it != o.ranges.end() && !it->second.empty())
      *range = {it->second[0], it->second[1]};
  Corpus corpus = generate_synthetic_corpus(spec, o.seed);
  save_corpus(corpus, o.out);
  out << "wrote " << corpus.pages.size() << " pages to " << o.out << "\n";
  return kOk;
}

void add_pipeline_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--algo", o.algo, "Clustering algorithm")
      ->check(CLI::IsMember(kAlgorithms))
      ->envname("NAVSEG_ALGO")
      ->capture_default_str();
  cmd->add_option("--beta", o.beta, "Gap-threshold tradeoff")->envname("NAVSEG_BETA")->capture_default_str();
  cmd->add_option("--gamma", o.gamma, "Density-threshold scale (0 disables the density test)")
      ->envname("NAVSEG_GAMMA")
      ->capture_default_str();
  cmd->add_option("--epsilon", o.epsilon, "Density smoothing constant")
      ->envname("NAVSEG_EPSILON")
      ->capture_default_str();
  cmd->add_option("--sigma", o.sigma, "Gaussian smoothing standard deviation")
      ->envname("NAVSEG_SIGMA")
      ->capture_default_str();
  cmd->add_option("--c", o.c, "SVM penalty")->envname("NAVSEG_C")->capture_default_str();
  cmd->add_option("--rbf-gamma", o.rbf_gamma, "RBF kernel coefficient")
      ->envname("NAVSEG_RBF_GAMMA")
      ->capture_default_str();
  cmd->add_option("--k", o.k, "k for k-means (0: ground-truth block count)")->envname("NAVSEG_K");
  cmd->add_option("--seed", o.seed, "Random seed")->envname("NAVSEG_SEED")->capture_default_str();
  cmd->add_option("--jobs", o.jobs, "Worker threads for corpus commands")
      ->envname("NAVSEG_JOBS")
      ->check(CLI::Range(1u, 1024u))
      ->capture_default_str();
  cmd->add_flag("--strict-decoding", o.strict, "Reject pages with malformed byte sequences");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"navseg: hyperlink block clustering and navigation extraction", "navseg"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "navseg 0.1.0");

  auto* parse = app.add_subcommand("parse", "Print the DFS-indexed DOM tree of a page");
  parse->add_option("--page", o.page, "HTML file")->required()->check(CLI::ExistingFile);
  parse->add_flag("--links", o.links_only, "Print hyperlinks only");

  auto* cluster = app.add_subcommand("cluster", "Cluster a page's hyperlinks into blocks");
  cluster->add_option("--page", o.page, "HTML file")->required()->check(CLI::ExistingFile);

  auto* features = app.add_subcommand("features", "Print block features of a page as CSV");
  features->add_option("--page", o.page, "HTML file")->required()->check(CLI::ExistingFile);
  features->add_option("--dump-partition", o.dump_partition, "Also write the partition to FILE");

  auto* train = app.add_subcommand("train", "Train a block classifier on a corpus");
  train->add_option("--corpus", o.corpus, "Corpus directory")->required()->check(CLI::ExistingDirectory);
  train->add_option("--out", o.out, "Model file to write")->required();
  train->add_flag("--all-pages", o.all_pages, "Train on every page instead of the training split");
  train->add_option("--dump-features", o.dump_features, "Write training block features to FILE");

  auto* extract = app.add_subcommand("extract", "Extract navigation blocks from a page");
  extract->add_option("--model", o.model, "Model file")->required()->check(CLI::ExistingFile);
  extract->add_option("--page", o.page, "HTML file")->required()->check(CLI::ExistingFile);
  extract->add_option("--out", o.out, "Output file (default: stdout)");

  auto* eval = app.add_subcommand("eval", "Split, train, predict and score a corpus");
  eval->add_option("--corpus", o.corpus, "Corpus directory")->required()->check(CLI::ExistingDirectory);
  eval->add_option("--model", o.model, "Score this model instead of training one")
      ->check(CLI::ExistingFile);
  eval->add_option("--report", o.report, "JSON report file");
  eval->add_option("--table", o.table, "Plain-text table file");
  eval->add_option("--dump-partition", o.dump_partition, "Directory for per-page partitions");
  eval->add_option("--dump-features", o.dump_features, "Directory for per-page feature CSVs");

  auto* curve = app.add_subcommand("learning-curve", "F1 against the share of training hyperlinks");
  curve->add_option("--corpus", o.corpus, "Corpus directory")->required()->check(CLI::ExistingDirectory);
  curve->add_option("--out", o.out, "CSV file (default: stdout)");
  curve->add_option("--fractions", o.fractions, "Comma-separated fractions in (0, 1]");
  curve->add_option("--repetitions", o.repetitions, "Shuffles averaged per fraction")
      ->check(CLI::Range(1u, 1000u))
      ->capture_default_str();

  auto* gen = app.add_subcommand("gen-corpus", "Write a synthetic labelled corpus");
  gen->add_option("--out", o.out, "Corpus directory to create")->required();
  gen->add_option("--pages", o.pages, "Page count")->check(CLI::Range(1u, 100000u))->capture_default_str();
  gen->add_option("--variant", o.variant, "standard or prose")
      ->check(CLI::IsMember({"standard", "prose"}))
      ->capture_default_str();
  gen->add_option("--id-prefix", o.id_prefix, "Page id prefix");
  gen->add_option("--seed", o.seed, "Random seed")->envname("NAVSEG_SEED")->capture_default_str();
  for (const char* name : {"menus", "lists", "links-per-block", "paragraphs", "links-per-paragraph", "ads",
                           "prose-words", "spacer-paragraphs"}) {
    gen->add_option(std::string("--") + name, o.ranges[name], std::string("Range LO HI for ") + name)
        ->expected(2)
        ->check(CLI::NonNegativeNumber);
  }

  for (auto* cmd : {parse, cluster, features, train, extract, eval, curve}) add_pipeline_options(cmd, o);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    for (const auto& [name, r] : o.ranges)
      if (!r.empty() && r[0] > r[1]) throw ContractViolation("--" + name + ": LO exceeds HI");
    if (*parse) return cmd_parse(o, out);
    if (*cluster) return cmd_cluster(o, out);
    if (*features) return cmd_features(o, out);
    if (*train) return cmd_train(o, out);
    if (*extract) return cmd_extract(o, out);
    if (*eval) return cmd_eval(o, out);
    if (*curve) return cmd_learning_curve(o, out);
    if (*gen) return cmd_gen_corpus(o, out);
  } catch (const SchemaError& e) {
    err << "navseg: invalid document: " << e.what() << "\n";
    return kUsageError;
  } catch (const ValidationError& e) {
    err << "navseg: " << e.what() << "\n";
    return kUsageError;
  } catch (const ContractViolation& e) {
    err << "navseg: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "navseg: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return kUsageError;
}

}  // namespace navseg::cli
