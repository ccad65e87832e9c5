#include "navseg/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "navseg/errors.hpp"

namespace navseg {
namespace {

struct Contingency {
  std::vector<std::uint64_t> rows;  // block sizes of a
  std::vector<std::uint64_t> cols;  // block sizes of b
  std::vector<std::vector<std::uint64_t>> cells;
  std::uint64_t n = 0;
};

Contingency contingency(const BlockPartition& a, const BlockPartition& b) {
  std::map<std::uint32_t, std::size_t> col_of;
  for (std::size_t j = 0; j < b.blocks.size(); ++j)
    for (std::uint32_t x : b.blocks[j])
      if (!col_of.emplace(x, j).second) throw ContractViolation("partition blocks overlap");
  Contingency t;
  t.cols.resize(b.blocks.size());
  for (std::size_t j = 0; j < b.blocks.size(); ++j) t.cols[j] = b.blocks[j].size();
  std::size_t seen = 0;
  std::set<std::uint32_t> a_elems;
  for (const Block& block : a.blocks) {
    std::vector<std::uint64_t> row(b.blocks.size(), 0);
    for (std::uint32_t x : block) {
      if (!a_elems.insert(x).second) throw ContractViolation("partition blocks overlap");
      auto it = col_of.find(x);
      if (it == col_of.end())
        throw ContractViolation("element " + std::to_string(x) + " is missing from one partition");
      ++row[it->second];
      ++seen;
    }
    t.rows.push_back(block.size());
    t.cells.push_back(std::move(row));
  }
  if (seen != col_of.size()) throw ContractViolation("partitions cover different elements");
  t.n = seen;
  // Empty blocks carry no information; drop them.
  std::erase(t.rows, 0);
  std::erase_if(t.cells, [](const auto& r) {
    return std::all_of(r.begin(), r.end(), [](std::uint64_t v) { return v == 0; });
  });
  return t;
}

double comb2(std::uint64_t x) { return static_cast<double>(x) * static_cast<double>(x - (x > 0)) / 2.0; }

double entropy(const std::vector<std::uint64_t>& sizes, std::uint64_t n) {
  double h = 0.0;
  for (std::uint64_t s : sizes)
    if (s > 0) {
      double p = static_cast<double>(s) / static_cast<double>(n);
      h -= p * std::log(p);
    }
  return h;
}

double mutual_information(const Contingency& t) {
  const double n = static_cast<double>(t.n);
  double mi = 0.0;
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    for (std::size_t j = 0; j < t.cols.size(); ++j) {
      std::uint64_t c = t.cells[i][j];
      if (c == 0) continue;
      double cd = static_cast<double>(c);
      mi += cd / n * std::log(n * cd / (static_cast<double>(t.rows[i]) * static_cast<double>(t.cols[j])));
    }
  return std::max(mi, 0.0);
}

// Expected mutual information under the hypergeometric model of random
// partitions with fixed block sizes.
double expected_mutual_information(const Contingency& t) {
  const std::uint64_t n = t.n;
  const double nd = static_cast<double>(n);
  const double lg_n = std::lgamma(nd + 1.0);
  double emi = 0.0;
  for (std::uint64_t ai : t.rows) {
    for (std::uint64_t bj : t.cols) {
      const double a = static_cast<double>(ai), b = static_cast<double>(bj);
      const double base = std::lgamma(a + 1.0) + std::lgamma(b + 1.0) + std::lgamma(nd - a + 1.0) +
                          std::lgamma(nd - b + 1.0) - lg_n;
      std::uint64_t lo = ai + bj > n ? ai + bj - n : 1;
      lo = std::max<std::uint64_t>(lo, 1);
      std::uint64_t hi = std::min(ai, bj);
      for (std::uint64_t k = lo; k <= hi; ++k) {
        const double kd = static_cast<double>(k);
        const double log_p = base - std::lgamma(kd + 1.0) - std::lgamma(a - kd + 1.0) -
                             std::lgamma(b - kd + 1.0) - std::lgamma(nd - a - b + kd + 1.0);
        emi += kd / nd * std::log(nd * kd / (a * b)) * std::exp(log_p);
      }
    }
  }
  return emi;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

double mean_of(const std::vector<PageEvaluation>& pages, double (*get)(const PageEvaluation&)) {
  if (pages.empty()) return 0.0;
  double s = 0.0;
  for (const auto& p : pages) s += get(p);
  return s / static_cast<double>(pages.size());
}

}  // namespace

double adjusted_rand_index(const BlockPartition& a, const BlockPartition& b) {
  Contingency t = contingency(a, b);
  if (a.same_partition(b)) return 1.0;
  double index = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (const auto& row : t.cells)
    for (std::uint64_t c : row) index += comb2(c);
  for (std::uint64_t r : t.rows) sum_a += comb2(r);
  for (std::uint64_t c : t.cols) sum_b += comb2(c);
  const double total = comb2(t.n);
  if (total == 0.0) return 1.0;
  const double expected = sum_a * sum_b / total;
  const double max_index = (sum_a + sum_b) / 2.0;
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

double adjusted_mutual_information(const BlockPartition& a, const BlockPartition& b) {
  Contingency t = contingency(a, b);
  if (a.same_partition(b)) return 1.0;
  if (t.rows.size() == t.cols.size() && (t.rows.size() <= 1)) return 1.0;
  const double mi = mutual_information(t);
  const double emi = expected_mutual_information(t);
  const double normalizer = (entropy(t.rows, t.n) + entropy(t.cols, t.n)) / 2.0;
  double denominator = normalizer - emi;
  constexpr double kTiny = 2.220446049250313e-16;
  if (denominator < 0) denominator = std::min(denominator, -kTiny);
  else denominator = std::max(denominator, kTiny);
  return (mi - emi) / denominator;
}

PartitionScore partition_score(const BlockPartition& predicted, const BlockPartition& truth) {
  return {adjusted_rand_index(predicted, truth), adjusted_mutual_information(predicted, truth)};
}

ExtractionScore extraction_scores(std::span<const std::uint32_t> predicted_nav,
                                  std::span<const std::uint32_t> truth_nav,
                                  std::span<const std::uint32_t> all) {
  std::set<std::uint32_t> universe(all.begin(), all.end());
  std::set<std::uint32_t> pred(predicted_nav.begin(), predicted_nav.end());
  std::set<std::uint32_t> truth(truth_nav.begin(), truth_nav.end());
  for (std::uint32_t x : pred)
    if (!universe.count(x))
      throw ContractViolation("predicted hyperlink " + std::to_string(x) + " is not on the page");
  for (std::uint32_t x : truth)
    if (!universe.count(x))
      throw ContractViolation("labelled hyperlink " + std::to_string(x) + " is not on the page");
  ExtractionScore s;
  for (std::uint32_t x : pred) (truth.count(x) ? s.tp : s.fp) += 1;
  s.fn = truth.size() - s.tp;
  s.precision = pred.empty() ? 1.0 : static_cast<double>(s.tp) / static_cast<double>(pred.size());
  s.recall = truth.empty() ? 1.0 : static_cast<double>(s.tp) / static_cast<double>(truth.size());
  s.f1 = s.precision + s.recall > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

CorpusReport evaluate_corpus(std::span<const BlockPartition> partitions,
                             std::span<const BlockPartition> truth_partitions,
                             std::span<const NavSet> predictions, std::span<const NavSet> truths) {
  std::map<std::string, const BlockPartition*> part, tpart;
  std::map<std::string, const NavSet*> pred, truth;
  auto index = [](auto& dest, const auto& src, const char* what) {
    for (const auto& x : src)
      if (!dest.emplace(x.page_id, &x).second)
        throw ContractViolation(std::string("duplicate page id '") + x.page_id + "' in " + what);
  };
  index(part, partitions, "partitions");
  index(tpart, truth_partitions, "truth partitions");
  index(pred, predictions, "predictions");
  index(truth, truths, "truths");

  std::set<std::string> all_ids;
  for (const auto& [id, _] : part) all_ids.insert(id);
  for (const auto& [id, _] : tpart) all_ids.insert(id);
  for (const auto& [id, _] : pred) all_ids.insert(id);
  for (const auto& [id, _] : truth) all_ids.insert(id);
  std::string misaligned;
  for (const auto& id : all_ids)
    if (!part.count(id) || !tpart.count(id) || !pred.count(id) || !truth.count(id))
      misaligned += (misaligned.empty() ? "" : ", ") + id;
  if (!misaligned.empty()) throw ContractViolation("pages not aligned across inputs: " + misaligned);

  CorpusReport report;
  for (const auto& id : all_ids) {
    const BlockPartition& p = *part[id];
    const BlockPartition& tp = *tpart[id];
    std::vector<std::uint32_t> links = tp.elements();
    if (links.empty()) {
      report.excluded_pages.push_back(id);
      continue;
    }
    PageEvaluation e;
    e.page_id = id;
    e.hyperlinks = links.size();
    e.predicted_blocks = p.blocks.size();
    e.truth_blocks = tp.blocks.size();
    e.partition = partition_score(p, tp);
    e.extraction = extraction_scores(pred[id]->indices, truth[id]->indices, links);
    report.pages.push_back(std::move(e));
  }
  report.mean_partition.ari = mean_of(report.pages, [](const PageEvaluation& e) { return e.partition.ari; });
  report.mean_partition.ami = mean_of(report.pages, [](const PageEvaluation& e) { return e.partition.ami; });
  report.mean_precision = mean_of(report.pages, [](const PageEvaluation& e) { return e.extraction.precision; });
  report.mean_recall = mean_of(report.pages, [](const PageEvaluation& e) { return e.extraction.recall; });
  report.mean_f1 = mean_of(report.pages, [](const PageEvaluation& e) { return e.extraction.f1; });
  return report;
}

std::string report_to_json(const CorpusReport& report) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["format"] = "navseg-report";
  doc["version"] = 1;
  ordered_json meta = ordered_json::object();
  for (const auto& [k, v] : report.metadata) meta[k] = v;
  doc["metadata"] = std::move(meta);
  doc["averages"] = {{"pages", report.pages.size()},
                     {"ari", report.mean_partition.ari},
                     {"ami", report.mean_partition.ami},
                     {"precision", report.mean_precision},
                     {"recall", report.mean_recall},
                     {"f1", report.mean_f1}};
  ordered_json pages = ordered_json::array();
  for (const auto& p : report.pages) {
    pages.push_back({{"page_id", p.page_id},
                     {"hyperlinks", p.hyperlinks},
                     {"predicted_blocks", p.predicted_blocks},
                     {"truth_blocks", p.truth_blocks},
                     {"ari", p.partition.ari},
                     {"ami", p.partition.ami},
                     {"precision", p.extraction.precision},
                     {"recall", p.extraction.recall},
                     {"f1", p.extraction.f1},
                     {"tp", p.extraction.tp},
                     {"fp", p.extraction.fp},
                     {"fn", p.extraction.fn}});
  }
  doc["pages"] = std::move(pages);
  doc["excluded_pages"] = report.excluded_pages;
  return doc.dump(2) + "\n";
}

std::string report_to_table(const CorpusReport& report) {
  std::size_t width = 7;
  for (const auto& p : report.pages) width = std::max(width, p.page_id.size());
  std::ostringstream out;
  for (const auto& [k, v] : report.metadata) out << k << ": " << v << "\n";
  if (!report.metadata.empty()) out << "\n";
  auto row = [&](const std::string& id, const std::string& links, double ari, double ami, double p,
                 double r, double f1) {
    out << id << std::string(width - id.size() + 2, ' ');
    char buf[128];
    std::snprintf(buf, sizeof buf, "%6s  %s  %s  %s  %s  %s\n", links.c_str(), format_number(ari).c_str(),
                  format_number(ami).c_str(), format_number(p).c_str(), format_number(r).c_str(),
                  format_number(f1).c_str());
    out << buf;
  };
  std::string head = "page";
  out << head << std::string(width - head.size() + 2, ' ')
      << " links     ARI     AMI    Prec     Rec      F1\n";
  for (const auto& p : report.pages)
    row(p.page_id, std::to_string(p.hyperlinks), p.partition.ari, p.partition.ami,
        p.extraction.precision, p.extraction.recall, p.extraction.f1);
  out << std::string(width + 2 + 46, '-') << "\n";
  row("mean", std::to_string(report.pages.size()) + "p", report.mean_partition.ari,
      report.mean_partition.ami, report.mean_precision, report.mean_recall, report.mean_f1);
  if (!report.excluded_pages.empty()) {
    out << "\nexcluded (no hyperlinks):";
    for (const auto& id : report.excluded_pages) out << " " << id;
    out << "\n";
  }
  return out.str();
}

std::vector<double> default_curve_fractions() {
  std::vector<double> out;
  for (int p = 1; p <= 10; ++p) out.push_back(p / 100.0);
  for (int p = 20; p <= 100; p += 10) out.push_back(p / 100.0);
  return out;
}

std::string curve_to_csv(std::span<const CurvePoint> points) {
  std::ostringstream out;
  out << "fraction,f1,training_blocks,training_links\n";
  char buf[64];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%.2f", p.fraction);
    out << buf << ",";
    if (p.present) {
      std::snprintf(buf, sizeof buf, "%.6f", p.mean_f1);
      out << buf;
    }
    out << "," << p.training_blocks << "," << p.training_links << "\n";
  }
  return out.str();
}

}  // namespace navseg
