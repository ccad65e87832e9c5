#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "navseg/corpus.hpp"
#include "navseg/errors.hpp"

using namespace navseg;
namespace fs = std::filesystem;

namespace {

const fs::path kBundled = fs::path(NAVSEG_SOURCE_DIR) / "data" / "synthetic";

class TempDir {
 public:
  explicit TempDir(const std::string& name) : path_(fs::temp_directory_path() / ("navseg_" + name)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

GeneratorSpec single_menu_spec() {
  GeneratorSpec s;
  s.pages = 1;
  s.menus = {1, 1};
  s.lists = {0, 0};
  s.links_per_block = {5, 5};
  s.content_paragraphs = {0, 0};
  s.ads = {0, 0};
  s.spacer_paragraphs = {0, 0};
  return s;
}

// Every directory entry (relative path -> bytes).
std::map<std::string, std::string> tree_bytes(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = slurp(e.path());
  return out;
}

}  // namespace

TEST(Categories, NamesAndClasses) {
  for (auto c : {Category::kMenu, Category::kList, Category::kContent, Category::kOther})
    EXPECT_EQ(parse_category(category_name(c)), c);
  EXPECT_TRUE(is_navigation(Category::kMenu));
  EXPECT_TRUE(is_navigation(Category::kList));
  EXPECT_FALSE(is_navigation(Category::kContent));
  EXPECT_FALSE(is_navigation(Category::kOther));
  EXPECT_THROW(parse_category("banner"), SchemaError);
}

TEST(Sha256, KnownDigests) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(BundledCorpus, LoadsAndValidates) {
  auto corpus = load_corpus(kBundled);
  ASSERT_EQ(corpus.pages.size(), 20u);
  for (std::size_t i = 1; i < corpus.pages.size(); ++i)
    EXPECT_LT(corpus.pages[i - 1].record.page_id, corpus.pages[i].record.page_id);
  for (const auto& p : corpus.pages) {
    EXPECT_NO_THROW(validate_labels(p.record, p.dom));
    EXPECT_EQ(p.record.sha256, sha256_hex(p.html));
    EXPECT_EQ(truth_partition(p).element_count(), p.dom.hyperlinks().size());
  }
  EXPECT_NE(corpus.find("page-003"), nullptr);
  EXPECT_EQ(corpus.find("page-999"), nullptr);
  auto parallel = load_corpus(kBundled, LoadOptions{4, {}});
  EXPECT_EQ(manifest_to_json(parallel), manifest_to_json(corpus));
}

TEST(BundledCorpus, MatchesTheGenerator) {
  auto regenerated = generate_synthetic_corpus(GeneratorSpec{}, 7);
  auto loaded = load_corpus(kBundled);
  EXPECT_EQ(corpus_digest(regenerated), corpus_digest(loaded));
}

TEST(CorpusIo, RoundTripIsIdentical) {
  TempDir a("roundtrip_a"), b("roundtrip_b");
  auto corpus = generate_synthetic_corpus(GeneratorSpec{}, 11);
  save_corpus(corpus, a.path());
  auto loaded = load_corpus(a.path());
  ASSERT_EQ(loaded.pages.size(), corpus.pages.size());
  for (std::size_t i = 0; i < corpus.pages.size(); ++i) {
    EXPECT_EQ(loaded.pages[i].record, corpus.pages[i].record);
    EXPECT_EQ(loaded.pages[i].html, corpus.pages[i].html);
  }
  save_corpus(loaded, b.path());
  EXPECT_EQ(tree_bytes(a.path()), tree_bytes(b.path()));
}

TEST(CorpusIo, CorruptLabelIndexIsRejected) {
  TempDir dir("corrupt");
  GeneratorSpec spec;
  spec.pages = 1;
  spec.menus = {2, 2};
  spec.lists = {3, 3};
  spec.links_per_block = {9, 9};
  spec.content_paragraphs = {3, 3};
  spec.ads = {2, 2};
  auto corpus = generate_synthetic_corpus(spec, 5);
  ASSERT_EQ(corpus.pages[0].dom.hyperlinks().size(), 50u);
  save_corpus(corpus, dir.path());
  const auto labels = dir.path() / "labels" / (corpus.pages[0].record.page_id + ".labels");
  auto doc = nlohmann::json::parse(slurp(labels));
  doc["links"][17]["index"] = 9999;
  spit(labels, doc.dump(1));
  try {
    load_corpus(dir.path());
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("9999"), std::string::npos);
  }
}

TEST(CorpusIo, MissingPageFileIsNamed) {
  TempDir dir("missing");
  auto corpus = generate_synthetic_corpus(single_menu_spec(), 1);
  save_corpus(corpus, dir.path());
  const auto page = dir.path() / "pages" / (corpus.pages[0].record.page_id + ".html");
  fs::remove(page);
  try {
    load_corpus(dir.path());
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find(page.string()), std::string::npos) << e.what();
  }
}

TEST(CorpusIo, EditedPageFailsHashCheck) {
  TempDir dir("hash");
  auto corpus = generate_synthetic_corpus(single_menu_spec(), 1);
  save_corpus(corpus, dir.path());
  const auto page = dir.path() / "pages" / (corpus.pages[0].record.page_id + ".html");
  spit(page, slurp(page) + "\n");
  EXPECT_THROW(load_corpus(dir.path()), ValidationError);
}

TEST(CorpusIo, ManifestSchemaErrors) {
  TempDir dir("schema");
  auto corpus = generate_synthetic_corpus(single_menu_spec(), 1);
  save_corpus(corpus, dir.path());
  const auto manifest = dir.path() / "manifest";
  const auto good = nlohmann::json::parse(slurp(manifest));
  auto expect_path = [&](nlohmann::json doc, const std::string& path) {
    spit(manifest, doc.dump());
    try {
      load_corpus(dir.path());
      ADD_FAILURE() << "accepted a manifest with a bad " << path;
    } catch (const SchemaError& e) {
      EXPECT_EQ(e.field_path(), path);
    }
  };
  auto j = good;
  j["format"] = "zip";
  expect_path(j, "/format");
  j = good;
  j["pages"][0]["html"] = "../outside.html";
  expect_path(j, "/pages/0/html");
  j = good;
  j["pages"][0]["id"] = "a b";
  expect_path(j, "/pages/0/id");
  j = good;
  j["pages"][0]["sha256"] = "xyz";
  expect_path(j, "/pages/0/sha256");
}

TEST(CorpusIo, LabelSchemaErrorsNameTheFile) {
  TempDir dir("labels_schema");
  auto corpus = generate_synthetic_corpus(single_menu_spec(), 1);
  save_corpus(corpus, dir.path());
  const auto labels = dir.path() / "labels" / (corpus.pages[0].record.page_id + ".labels");
  auto doc = nlohmann::json::parse(slurp(labels));
  doc["links"][2]["category"] = "banner";
  spit(labels, doc.dump());
  try {
    load_corpus(dir.path());
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.field_path(), labels.string() + "#/links/2/category");
  }
}

TEST(Labels, InvariantViolations) {
  auto corpus = generate_synthetic_corpus(single_menu_spec(), 1);
  const auto& page = corpus.pages[0];
  auto broken = page.record;
  broken.labels.pop_back();
  EXPECT_THROW(validate_labels(broken, page.dom), ValidationError);
  broken = page.record;
  broken.labels.push_back(broken.labels.back());
  EXPECT_THROW(validate_labels(broken, page.dom), ValidationError);
  broken = page.record;
  broken.labels[1].category = Category::kContent;  // same block, different category
  EXPECT_THROW(validate_labels(broken, page.dom), ValidationError);
  broken = page.record;
  broken.labels[0].index = 1;  // <html> is not a hyperlink
  EXPECT_THROW(validate_labels(broken, page.dom), ValidationError);
}

TEST(Split, Examples) {
  std::vector<std::string> ids{"e", "a", "c", "b", "d"};
  auto s = split_corpus(ids, 7);
  EXPECT_EQ(s.train_ids.size(), 3u);
  EXPECT_EQ(s.test_ids.size(), 2u);
  EXPECT_TRUE(std::is_sorted(s.train_ids.begin(), s.train_ids.end()));
  std::set<std::string> all(s.train_ids.begin(), s.train_ids.end());
  all.insert(s.test_ids.begin(), s.test_ids.end());
  EXPECT_EQ(all.size(), 5u);
  auto again = split_corpus(ids, 7);
  EXPECT_EQ(again.train_ids, s.train_ids);
  EXPECT_THROW(split_corpus(std::vector<std::string>{"x"}, 1), ContractViolation);
  std::vector<std::string> even{"a", "b", "c", "d"};
  EXPECT_EQ(split_corpus(even, 3).train_ids.size(), 2u);
}

TEST(Split, DifferentSeedsDiffer) {
  std::vector<std::string> ids;
  for (int i = 0; i < 20; ++i) ids.push_back("p" + std::to_string(100 + i));
  std::set<std::vector<std::string>> seen;
  for (std::uint64_t seed = 0; seed < 100; ++seed) seen.insert(split_corpus(ids, seed).train_ids);
  EXPECT_GE(seen.size(), 99u);
}

TEST(Generator, SingleMenuPage) {
  auto corpus = generate_synthetic_corpus(single_menu_spec(), 42);
  ASSERT_EQ(corpus.pages.size(), 1u);
  const auto& page = corpus.pages[0];
  auto truth = truth_partition(page);
  ASSERT_EQ(truth.blocks.size(), 1u);
  EXPECT_EQ(truth.blocks[0].size(), 5u);
  EXPECT_EQ(truth_navigation(page).size(), 5u);
  for (const auto& l : page.record.labels) EXPECT_EQ(l.category, Category::kMenu);
}

TEST(Generator, DeterministicAndSeedSensitive) {
  auto a = generate_synthetic_corpus(prose_heavy_spec(), 3), b = generate_synthetic_corpus(prose_heavy_spec(), 3);
  auto c = generate_synthetic_corpus(prose_heavy_spec(), 4);
  ASSERT_EQ(a.pages.size(), b.pages.size());
  for (std::size_t i = 0; i < a.pages.size(); ++i) {
    EXPECT_EQ(a.pages[i].html, b.pages[i].html);
    EXPECT_EQ(labels_to_json(a.pages[i].record, a.pages[i].dom), labels_to_json(b.pages[i].record, b.pages[i].dom));
  }
  EXPECT_EQ(manifest_to_json(a), manifest_to_json(b));
  EXPECT_NE(corpus_digest(a), corpus_digest(c));
}

TEST(Generator, TruthBlocksShareAnAncestorWithNoForeignLinks) {
  for (auto spec : {GeneratorSpec{}, prose_heavy_spec()}) {
    auto corpus = generate_synthetic_corpus(spec, 9);
    for (const auto& page : corpus.pages) {
      for (const auto& block : truth_partition(page).blocks) {
        // Walk up from the first link until the subtree holds the whole block.
        std::uint32_t anc = block.front();
        while (page.dom.node(NodeId{anc}).subtree_end < block.back()) anc = page.dom.node(NodeId{anc}).parent;
        auto inside = page.dom.hyperlinks_in(NodeId{anc});
        std::vector<std::uint32_t> got;
        for (const auto& h : inside) got.push_back(h.index);
        EXPECT_EQ(got, block) << page.record.page_id;
      }
    }
  }
}

TEST(Generator, SpecValidation) {
  GeneratorSpec s;
  s.pages = 0;
  EXPECT_THROW(s.validate(), ContractViolation);
  s = {};
  s.menus = {3, 1};
  EXPECT_THROW(s.validate(), ContractViolation);
  s = {};
  s.id_prefix = "bad id";
  EXPECT_THROW(s.validate(), ContractViolation);
  EXPECT_NO_THROW(prose_heavy_spec().validate());
}
