#include "navseg/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "navseg/errors.hpp"
#include "navseg/random.hpp"
#include "parallel.hpp"

namespace navseg {
namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

const CorpusPage& page_or_throw(const Corpus& corpus, const std::string& id) {
  const CorpusPage* p = corpus.find(id);
  if (!p) throw ContractViolation("page '" + id + "' is not in the corpus");
  return *p;
}

std::size_t covered_links(std::span<const LabelledBlock> blocks) {
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.links.size();
  return n;
}

bool both_classes(std::span<const LabelledBlock> blocks) {
  bool nav = false, other = false;
  for (const auto& b : blocks) (b.nav ? nav : other) = true;
  return nav && other;
}

}  // namespace

void PipelineConfig::validate() const {
  clustering.validate();
  svm.validate();
  if (!(smoothing.sigma > 0) || smoothing.radius < 0)
    throw ContractViolation("smoothing needs sigma > 0 and radius >= 0");
}

BlockPartition cluster_page(const IndexedDom& dom, const PipelineConfig& cfg,
                            std::optional<std::size_t> truth_blocks) {
  ClusteringConfig cc = cfg.clustering;
  if (cfg.algorithm == Algorithm::kChd) cc.gamma = 0.0;
  switch (cfg.algorithm) {
    case Algorithm::kChd:
    case Algorithm::kChdHd:
      return cluster_chd(dom, resolve_thresholds(dom, cc));
    case Algorithm::kAgglomerative:
      return cluster_agglomerative(dom, resolve_thresholds(dom, cc).gt);
    case Algorithm::kDbscan:
      return cluster_density(dom, resolve_thresholds(dom, cc).gt);
    case Algorithm::kKMeans: {
      if (dom.hyperlinks().empty()) return {};
      std::size_t k = cfg.kmeans_k ? cfg.kmeans_k : truth_blocks.value_or(0);
      if (k == 0) throw ContractViolation("k-means needs k (no ground truth to take it from)");
      k = std::min(k, dom.hyperlinks().size());
      return cluster_kmeans(dom, k, cfg.seed);
    }
  }
  throw ContractViolation("unknown algorithm");
}

std::vector<LabelledBlock> labelled_blocks(const CorpusPage& page, const PipelineConfig& cfg) {
  BlockPartition truth = truth_partition(page);
  BlockPartition partition = cluster_page(page.dom, cfg, truth.blocks.size());
  std::vector<BlockFeatures> features = block_features(page.dom, partition, cfg.smoothing);
  std::vector<std::uint32_t> nav = truth_navigation(page);
  std::vector<LabelledBlock> out;
  for (std::size_t i = 0; i < partition.blocks.size(); ++i) {
    LabelledBlock b;
    b.page_id = page.record.page_id;
    b.links = partition.blocks[i];
    b.features = features[i];
    std::size_t hits = 0;
    for (std::uint32_t x : b.links) hits += std::binary_search(nav.begin(), nav.end(), x);
    b.nav = 2 * hits > b.links.size();
    out.push_back(std::move(b));
  }
  return out;
}

std::vector<LabelledBlock> collect_blocks(const Corpus& corpus, std::span<const std::string> page_ids,
                                          const PipelineConfig& cfg) {
  std::vector<std::vector<LabelledBlock>> per_page(page_ids.size());
  parallel_for(page_ids.size(), cfg.jobs, [&](std::size_t i) {
    per_page[i] = labelled_blocks(page_or_throw(corpus, page_ids[i]), cfg);
  });
  std::vector<LabelledBlock> out;
  for (auto& v : per_page) std::move(v.begin(), v.end(), std::back_inserter(out));
  return out;
}

SvmModel train_on_blocks(std::span<const LabelledBlock> blocks, const SvmConfig& svm) {
  if (!both_classes(blocks))
    throw TrainingError("training blocks must include both navigation and other blocks");
  std::vector<BlockFeatures> feats;
  for (const auto& b : blocks) feats.push_back(b.features);
  FeatureScaler scaler = fit_scaler(feats);
  std::vector<TrainingSample> samples;
  for (const auto& b : blocks) samples.push_back({apply_scaler(scaler, b.features), b.nav});
  return train(samples, svm, scaler);
}

std::vector<ClassifiedBlock> classify_page(const IndexedDom& dom, const BlockPartition& partition,
                                           const SvmModel& model, const SmoothingConfig& smoothing) {
  std::vector<BlockFeatures> features = block_features(dom, partition, smoothing);
  std::vector<ClassifiedBlock> out;
  for (std::size_t i = 0; i < partition.blocks.size(); ++i)
    out.push_back({i, partition.blocks[i], features[i], predict(model, features[i])});
  return out;
}

std::vector<std::uint32_t> predicted_navigation(std::span<const ClassifiedBlock> blocks) {
  std::vector<std::uint32_t> out;
  for (const auto& b : blocks)
    if (b.prediction.nav) out.insert(out.end(), b.links.begin(), b.links.end());
  std::sort(out.begin(), out.end());
  return out;
}

CorpusReport evaluate_pages(const Corpus& corpus, std::span<const std::string> page_ids,
                            const SvmModel& model, const PipelineConfig& cfg,
                            std::vector<BlockPartition>* partitions) {
  const std::size_t n = page_ids.size();
  std::vector<BlockPartition> parts(n), truths(n);
  std::vector<NavSet> preds(n), truth_nav(n);
  parallel_for(n, cfg.jobs, [&](std::size_t i) {
    const CorpusPage& page = page_or_throw(corpus, page_ids[i]);
    truths[i] = truth_partition(page);
    parts[i] = cluster_page(page.dom, cfg, truths[i].blocks.size());
    parts[i].page_id = page.record.page_id;
    auto classified = classify_page(page.dom, parts[i], model, cfg.smoothing);
    preds[i] = {page.record.page_id, predicted_navigation(classified)};
    truth_nav[i] = {page.record.page_id, truth_navigation(page)};
  });
  CorpusReport report = evaluate_corpus(parts, truths, preds, truth_nav);
  if (partitions) *partitions = std::move(parts);
  return report;
}

EvaluationRun run_evaluation(const Corpus& corpus, const PipelineConfig& cfg) {
  cfg.validate();
  EvaluationRun run;
  run.split = split_corpus(corpus, cfg.seed);
  std::vector<LabelledBlock> blocks = collect_blocks(corpus, run.split.train_ids, cfg);
  run.model = train_on_blocks(blocks, cfg.svm);
  run.report = evaluate_pages(corpus, run.split.test_ids, run.model, cfg, &run.test_partitions);
  run.report.metadata = report_metadata(corpus, cfg, run.split);
  return run;
}

std::vector<CurvePoint> learning_curve(const Corpus& corpus, const PipelineConfig& cfg,
                                       const CurveConfig& curve) {
  cfg.validate();
  if (curve.repetitions == 0) throw ContractViolation("learning curve needs at least one repetition");
  for (std::size_t i = 0; i < curve.fractions.size(); ++i) {
    double f = curve.fractions[i];
    if (!(f > 0.0 && f <= 1.0)) throw ContractViolation("curve fractions must lie in (0, 1]");
    if (i > 0 && f < curve.fractions[i - 1]) throw ContractViolation("curve fractions must be ascending");
  }
  SplitSpec split = split_corpus(corpus, cfg.seed);
  std::vector<LabelledBlock> blocks = collect_blocks(corpus, split.train_ids, cfg);
  const std::size_t total_links = covered_links(blocks);

  std::vector<CurvePoint> points;
  for (double f : curve.fractions) points.push_back({f, false, 0.0, 0, 0});
  std::vector<std::size_t> present(points.size(), 0);
  std::vector<double> f1_sum(points.size(), 0.0);

  for (unsigned rep = 0; rep < curve.repetitions; ++rep) {
    std::vector<std::size_t> order(blocks.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(cfg.seed + 0x9e3779b97f4a7c15ULL * (rep + 1));
    rng.shuffle(std::span<std::size_t>(order));

    std::size_t taken = 0, links = 0;
    for (std::size_t p = 0; p < points.size(); ++p) {
      const auto target = static_cast<std::size_t>(std::ceil(points[p].fraction * static_cast<double>(total_links) - 1e-9));
      while (links < target && taken < order.size()) links += blocks[order[taken++]].links.size();
      // Training order does not depend on the draw order, so the full
      // fraction reproduces the plain evaluation run exactly.
      std::vector<std::size_t> chosen(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(taken));
      std::sort(chosen.begin(), chosen.end());
      std::vector<LabelledBlock> subset;
      for (std::size_t idx : chosen) subset.push_back(blocks[idx]);
      if (rep == 0) {
        points[p].training_blocks = subset.size();
        points[p].training_links = links;
      }
      if (!both_classes(subset)) continue;
      SvmModel model = train_on_blocks(subset, cfg.svm);
      f1_sum[p] += evaluate_pages(corpus, split.test_ids, model, cfg).mean_f1;
      ++present[p];
    }
  }
  for (std::size_t p = 0; p < points.size(); ++p) {
    points[p].present = present[p] > 0;
    if (present[p]) points[p].mean_f1 = f1_sum[p] / static_cast<double>(present[p]);
  }
  return points;
}

std::vector<std::pair<std::string, std::string>> report_metadata(const Corpus& corpus,
                                                                 const PipelineConfig& cfg,
                                                                 const SplitSpec& split) {
  return {{"algorithm", std::string(algorithm_name(cfg.algorithm))},
          {"seed", std::to_string(cfg.seed)},
          {"corpus_sha256", corpus_digest(corpus)},
          {"train_pages", std::to_string(split.train_ids.size())},
          {"test_pages", std::to_string(split.test_ids.size())},
          {"beta", fmt(cfg.clustering.beta)},
          {"gamma", fmt(cfg.algorithm == Algorithm::kChd ? 0.0 : cfg.clustering.gamma)},
          {"epsilon", fmt(cfg.clustering.epsilon)},
          {"sigma", fmt(cfg.smoothing.sigma)},
          {"svm_c", fmt(cfg.svm.c)},
          {"rbf_gamma", fmt(cfg.svm.rbf_gamma)},
          {"ami_normalizer", "arithmetic"}};
}

}  // namespace navseg
