#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "navseg/clustering.hpp"
#include "navseg/corpus.hpp"
#include "navseg/evaluation.hpp"
#include "navseg/features.hpp"
#include "navseg/svm.hpp"

namespace navseg {

struct PipelineConfig {
  Algorithm algorithm = Algorithm::kChdHd;
  ClusteringConfig clustering;  // gamma is forced to 0 for plain CHD
  SmoothingConfig smoothing;
  SvmConfig svm;
  std::size_t kmeans_k = 0;  // 0: number of ground-truth blocks of the page
  std::uint64_t seed = 7;
  unsigned jobs = 1;

  void validate() const;
};

/// Clusters one page with the configured algorithm. `truth_blocks` supplies
/// k for k-means when kmeans_k is 0; without either, ContractViolation.
BlockPartition cluster_page(const IndexedDom& dom, const PipelineConfig& cfg,
                            std::optional<std::size_t> truth_blocks = std::nullopt);

/// A clustered block with its features and majority ground-truth label.
struct LabelledBlock {
  std::string page_id;
  Block links;
  BlockFeatures features;
  bool nav = false;
};

/// Clusters a labelled page; a block is navigation when more than half of
/// its hyperlinks are labelled menu or list.
std::vector<LabelledBlock> labelled_blocks(const CorpusPage& page, const PipelineConfig& cfg);

/// Blocks of every listed page, in page order then block order.
std::vector<LabelledBlock> collect_blocks(const Corpus& corpus, std::span<const std::string> page_ids,
                                          const PipelineConfig& cfg);

/// Fits the scaler on the blocks and trains the SVM on their scaled features.
/// Throws TrainingError if the blocks hold a single class.
SvmModel train_on_blocks(std::span<const LabelledBlock> blocks, const SvmConfig& svm);

struct ClassifiedBlock {
  std::size_t block_id = 0;  // position in the page partition
  Block links;
  BlockFeatures features;
  Prediction prediction;
};

std::vector<ClassifiedBlock> classify_page(const IndexedDom& dom, const BlockPartition& partition,
                                           const SvmModel& model, const SmoothingConfig& smoothing);

/// Ascending indices of hyperlinks in blocks predicted as navigation.
std::vector<std::uint32_t> predicted_navigation(std::span<const ClassifiedBlock> blocks);

struct EvaluationRun {
  SplitSpec split;
  SvmModel model;
  std::vector<BlockPartition> test_partitions;  // test pages, page order
  CorpusReport report;
};

/// Split, cluster, train on the training pages, then predict and score the
/// test pages.
EvaluationRun run_evaluation(const Corpus& corpus, const PipelineConfig& cfg);

/// Scores a fixed model on the given pages.
CorpusReport evaluate_pages(const Corpus& corpus, std::span<const std::string> page_ids,
                            const SvmModel& model, const PipelineConfig& cfg,
                            std::vector<BlockPartition>* partitions = nullptr);

struct CurveConfig {
  std::vector<double> fractions = default_curve_fractions();
  /// Independent shuffles averaged per fraction; draws within one shuffle
  /// are nested across fractions.
  unsigned repetitions = 5;
};

/// For each fraction, trains on shuffled training blocks until they cover
/// that share of training hyperlinks, and scores mean F1 on the test pages.
std::vector<CurvePoint> learning_curve(const Corpus& corpus, const PipelineConfig& cfg,
                                       const CurveConfig& curve);

/// Run parameters recorded in reports.
std::vector<std::pair<std::string, std::string>> report_metadata(const Corpus& corpus,
                                                                 const PipelineConfig& cfg,
                                                                 const SplitSpec& split);

}  // namespace navseg
