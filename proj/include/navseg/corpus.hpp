#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "navseg/clustering.hpp"
#include "navseg/dom.hpp"

namespace navseg {

enum class Category { kMenu, kList, kContent, kOther };

std::string_view category_name(Category c);
/// Throws SchemaError (path "") on an unknown name.
Category parse_category(std::string_view name);
/// Menus and lists are the positive class.
constexpr bool is_navigation(Category c) { return c == Category::kMenu || c == Category::kList; }

struct LinkLabel {
  std::uint32_t index = 0;  // hyperlink DFS index
  std::int64_t block = 0;
  Category category = Category::kOther;

  bool operator==(const LinkLabel&) const = default;
};

struct PageRecord {
  std::string page_id;
  std::filesystem::path html_path;  // relative to the corpus root
  std::vector<LinkLabel> labels;    // ascending index
  std::string sha256;               // of the HTML bytes, lowercase hex

  bool operator==(const PageRecord&) const = default;
};

struct CorpusPage {
  PageRecord record;
  std::string html;  // raw bytes
  IndexedDom dom;
};

struct Corpus {
  std::vector<CorpusPage> pages;  // ordered by page id

  const CorpusPage* find(std::string_view page_id) const;
};

struct LoadOptions {
  unsigned jobs = 1;
  ParseOptions parse;
};

/// Reads `manifest`, every page and label file, and validates labels against
/// the freshly parsed pages. Throws ValidationError (naming the page, index or
/// path) or SchemaError.
Corpus load_corpus(const std::filesystem::path& dir, const LoadOptions& options = {});

/// Checks the label invariants of one page; throws ValidationError.
void validate_labels(const PageRecord& record, const IndexedDom& dom);

/// Writes manifest, pages/<id>.html and labels/<id>.labels under `dir`.
void save_corpus(const Corpus& corpus, const std::filesystem::path& dir);

std::string labels_to_json(const PageRecord& record, const IndexedDom& dom);
std::string manifest_to_json(const Corpus& corpus);

/// Digest over the manifest content, identifying a corpus version.
std::string corpus_digest(const Corpus& corpus);

std::string sha256_hex(std::string_view bytes);

BlockPartition truth_partition(const CorpusPage& page);
/// Ascending indices of hyperlinks labelled menu or list.
std::vector<std::uint32_t> truth_navigation(const CorpusPage& page);

struct SplitSpec {
  std::uint64_t seed = 0;
  std::vector<std::string> train_ids;  // sorted
  std::vector<std::string> test_ids;   // sorted
};

/// Seeded 50/50 split by page count; the training side gets the extra page.
/// Throws ContractViolation with fewer than two pages.
SplitSpec split_corpus(std::span<const std::string> page_ids, std::uint64_t seed);
SplitSpec split_corpus(const Corpus& corpus, std::uint64_t seed);

struct CountRange {
  std::uint32_t lo = 0;
  std::uint32_t hi = 0;
};

/// Shape of generated pages. Every block is separated from the next by a
/// run of short prose paragraphs, which keeps blocks far apart in the tree.
struct GeneratorSpec {
  std::uint32_t pages = 20;
  CountRange menus{1, 2};
  CountRange lists{1, 3};
  CountRange links_per_block{4, 9};      // menus and lists
  CountRange content_paragraphs{2, 4};   // paragraphs that carry links
  CountRange links_per_paragraph{1, 1};  // each one its own block
  CountRange ads{0, 2};
  CountRange prose_words{30, 60};        // around and between in-text links
  CountRange spacer_paragraphs{12, 16};  // between blocks
  std::string id_prefix = "page";

  /// Throws ContractViolation on inverted ranges or an empty page plan.
  void validate() const;
};

/// Several links per paragraph, separated by long prose.
GeneratorSpec prose_heavy_spec();

/// Deterministic in (spec, seed). Labels are exact by construction.
Corpus generate_synthetic_corpus(const GeneratorSpec& spec, std::uint64_t seed);

}  // namespace navseg
