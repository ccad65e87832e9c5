#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "navseg/clustering.hpp"

namespace navseg {

struct PartitionScore {
  double ari = 0.0;
  double ami = 0.0;
};

struct ExtractionScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
};

/// Throws ContractViolation unless both partitions cover the same elements.
double adjusted_rand_index(const BlockPartition& a, const BlockPartition& b);

/// Chance-adjusted mutual information, arithmetic-mean normalization,
/// natural logarithms.
double adjusted_mutual_information(const BlockPartition& a, const BlockPartition& b);

PartitionScore partition_score(const BlockPartition& predicted, const BlockPartition& truth);

/// Every hyperlink index counts once, whatever its href. Precision is 1 when
/// nothing is predicted and recall is 1 when the truth is empty. Throws
/// ContractViolation if either set is not contained in `all`.
ExtractionScore extraction_scores(std::span<const std::uint32_t> predicted_nav,
                                  std::span<const std::uint32_t> truth_nav,
                                  std::span<const std::uint32_t> all);

/// Navigation hyperlinks of one page.
struct NavSet {
  std::string page_id;
  std::vector<std::uint32_t> indices;
};

struct PageEvaluation {
  std::string page_id;
  std::size_t hyperlinks = 0;
  std::size_t predicted_blocks = 0;
  std::size_t truth_blocks = 0;
  PartitionScore partition;
  ExtractionScore extraction;
};

struct CorpusReport {
  std::vector<PageEvaluation> pages;        // ordered by page id
  std::vector<std::string> excluded_pages;  // pages without hyperlinks
  PartitionScore mean_partition;
  double mean_precision = 0.0;
  double mean_recall = 0.0;
  double mean_f1 = 0.0;
  std::vector<std::pair<std::string, std::string>> metadata;
};

/// Scores aligned per-page results. The four lists may come in any order but
/// must name the same page ids; otherwise ContractViolation lists the
/// offending ids. Pages without hyperlinks are excluded from the means.
CorpusReport evaluate_corpus(std::span<const BlockPartition> partitions,
                             std::span<const BlockPartition> truth_partitions,
                             std::span<const NavSet> predictions, std::span<const NavSet> truths);

/// Machine-readable report (JSON, stable key order, trailing newline).
std::string report_to_json(const CorpusReport& report);
/// Plain-text table: one row per page, then the means.
std::string report_to_table(const CorpusReport& report);

struct CurvePoint {
  double fraction = 0.0;
  bool present = false;  // false when the subsample held a single class
  double mean_f1 = 0.0;
  std::size_t training_blocks = 0;
  std::size_t training_links = 0;
};

/// 0.01 .. 0.10 by 0.01, then 0.2 .. 1.0 by 0.1.
std::vector<double> default_curve_fractions();

/// fraction,f1 rows; absent points leave f1 empty.
std::string curve_to_csv(std::span<const CurvePoint> points);

}  // namespace navseg
