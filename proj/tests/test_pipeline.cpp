#include <gtest/gtest.h>

#include <filesystem>

#include "navseg/errors.hpp"
#include "navseg/pipeline.hpp"

using namespace navseg;
namespace fs = std::filesystem;

namespace {

const Corpus& bundled() {
  static const Corpus c = load_corpus(fs::path(NAVSEG_SOURCE_DIR) / "data" / "synthetic");
  return c;
}

}  // namespace

TEST(PipelineConfig, Validation) {
  PipelineConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.clustering.beta, 1.0);
  EXPECT_EQ(cfg.clustering.gamma, 1.0);
  EXPECT_EQ(cfg.clustering.epsilon, 1e-10);
  EXPECT_EQ(cfg.smoothing.sigma, 2.0);
  EXPECT_EQ(cfg.svm.c, 1.0);
  EXPECT_EQ(cfg.svm.rbf_gamma, 0.1);
  cfg.svm.c = -2;
  EXPECT_THROW(cfg.validate(), ContractViolation);
}

TEST(ClusterPage, KMeansNeedsK) {
  const auto& page = bundled().pages[0];
  PipelineConfig cfg;
  cfg.algorithm = Algorithm::kKMeans;
  EXPECT_THROW(cluster_page(page.dom, cfg), ContractViolation);
  auto truth = truth_partition(page);
  EXPECT_EQ(cluster_page(page.dom, cfg, truth.blocks.size()).blocks.size(), truth.blocks.size());
  cfg.kmeans_k = 2;
  EXPECT_EQ(cluster_page(page.dom, cfg, truth.blocks.size()).blocks.size(), 2u);
}

TEST(ClusterPage, PlainChdIgnoresDensity) {
  const auto& page = bundled().pages[1];
  PipelineConfig chd;
  chd.algorithm = Algorithm::kChd;
  ClusteringConfig manual = resolve_thresholds(page.dom, chd.clustering);
  manual.hdt = 0;
  EXPECT_TRUE(cluster_page(page.dom, chd).same_partition(cluster_chd(page.dom, manual)));
}

TEST(LabelledBlocks, MajorityVote) {
  const auto& page = bundled().pages[2];
  PipelineConfig cfg;
  cfg.algorithm = Algorithm::kKMeans;
  cfg.kmeans_k = 1;  // one block holding every hyperlink
  auto blocks = labelled_blocks(page, cfg);
  ASSERT_EQ(blocks.size(), 1u);
  std::size_t nav = truth_navigation(page).size(), total = page.dom.hyperlinks().size();
  EXPECT_EQ(blocks[0].nav, 2 * nav > total);
  EXPECT_EQ(blocks[0].features.count, total);
}

TEST(Training, SingleClassIsRejected) {
  auto blocks = collect_blocks(bundled(), std::vector<std::string>{"page-001"}, PipelineConfig{});
  std::erase_if(blocks, [](const LabelledBlock& b) { return !b.nav; });
  ASSERT_FALSE(blocks.empty());
  EXPECT_THROW(train_on_blocks(blocks, SvmConfig{}), TrainingError);
}

TEST(Evaluation, BundledCorpusQuality) {
  PipelineConfig cfg;
  auto run = run_evaluation(bundled(), cfg);
  EXPECT_EQ(run.split.train_ids.size(), 10u);
  EXPECT_EQ(run.report.pages.size(), 10u);
  EXPECT_GE(run.report.mean_partition.ari, 0.95);
  EXPECT_GE(run.report.mean_f1, 0.90);
  for (const auto& p : run.report.pages)
    EXPECT_TRUE(std::find(run.split.test_ids.begin(), run.split.test_ids.end(), p.page_id) != run.split.test_ids.end());
}

TEST(Evaluation, FixedModelReproducesTheRun) {
  PipelineConfig cfg;
  auto run = run_evaluation(bundled(), cfg);
  auto again = evaluate_pages(bundled(), run.split.test_ids, run.model, cfg);
  again.metadata = run.report.metadata;
  EXPECT_EQ(report_to_json(again), report_to_json(run.report));
}

TEST(Evaluation, ClassifiedBlocksCoverThePage) {
  PipelineConfig cfg;
  auto run = run_evaluation(bundled(), cfg);
  const auto& page = *bundled().find(run.split.test_ids.front());
  auto part = cluster_page(page.dom, cfg);
  auto cls = classify_page(page.dom, part, run.model, cfg.smoothing);
  ASSERT_EQ(cls.size(), part.blocks.size());
  std::vector<std::uint32_t> nav;
  for (const auto& b : cls) {
    EXPECT_EQ(b.links, part.blocks[b.block_id]);
    EXPECT_EQ(b.prediction.nav, b.prediction.decision_value > 0);
    if (b.prediction.nav) nav.insert(nav.end(), b.links.begin(), b.links.end());
  }
  std::sort(nav.begin(), nav.end());
  EXPECT_EQ(predicted_navigation(cls), nav);
}

TEST(Evaluation, MetadataRecordsTheRun) {
  PipelineConfig cfg;
  auto run = run_evaluation(bundled(), cfg);
  std::map<std::string, std::string> md(run.report.metadata.begin(), run.report.metadata.end());
  EXPECT_EQ(md["algorithm"], "chd-hd");
  EXPECT_EQ(md["seed"], "7");
  EXPECT_EQ(md["ami_normalizer"], "arithmetic");
  EXPECT_EQ(md["corpus_sha256"], corpus_digest(bundled()));
}

TEST(LearningCurve, FullFractionEqualsEvaluation) {
  PipelineConfig cfg;
  CurveConfig curve;
  curve.fractions = {0.3, 1.0};
  curve.repetitions = 2;
  auto points = learning_curve(bundled(), cfg, curve);
  ASSERT_EQ(points.size(), 2u);
  auto run = run_evaluation(bundled(), cfg);
  ASSERT_TRUE(points[1].present);
  EXPECT_EQ(points[1].mean_f1, run.report.mean_f1);
  EXPECT_LE(points[0].training_links, points[1].training_links);
  EXPECT_LE(points[0].training_blocks, points[1].training_blocks);
  EXPECT_EQ(curve_to_csv(points), curve_to_csv(learning_curve(bundled(), cfg, curve)));
}
