#include "navseg/corpus.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "navseg/errors.hpp"
#include "navseg/random.hpp"
#include "parallel.hpp"

namespace navseg {
namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr const char* kManifestFormat = "navseg-corpus";
constexpr const char* kLabelsFormat = "navseg-labels";

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing " + path.string());
}

bool valid_page_id(std::string_view id) {
  if (id.empty() || id.front() == '.') return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
           c == '_' || c == '.';
  });
}

fs::path relative_path(const json& v, const std::string& where) {
  if (!v.is_string()) throw SchemaError(where, "expected a path string");
  fs::path p(v.get<std::string>());
  if (p.empty() || p.is_absolute()) throw SchemaError(where, "expected a relative path");
  for (const auto& part : p)
    if (part == "..") throw SchemaError(where, "path leaves the corpus directory");
  return p;
}

const json& member(const json& obj, const std::string& where, const char* key) {
  if (!obj.is_object()) throw SchemaError(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(where + "/" + key, "missing field");
  return *it;
}

struct ManifestEntry {
  std::string id;
  fs::path html;
  fs::path labels;
  std::string sha256;
};

std::vector<ManifestEntry> parse_manifest(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("manifest is not JSON: ") + e.what());
  }
  const json& format = member(doc, "", "format");
  if (format != kManifestFormat) throw SchemaError("/format", "expected \"navseg-corpus\"");
  if (member(doc, "", "version") != 1) throw SchemaError("/version", "unsupported version");
  const json& pages = member(doc, "", "pages");
  if (!pages.is_array()) throw SchemaError("/pages", "expected an array");
  std::vector<ManifestEntry> out;
  for (std::size_t i = 0; i < pages.size(); ++i) {
    std::string where = "/pages/" + std::to_string(i);
    ManifestEntry e;
    const json& id = member(pages[i], where, "id");
    if (!id.is_string() || !valid_page_id(id.get<std::string>()))
      throw SchemaError(where + "/id", "page ids use letters, digits, '-', '_' and '.'");
    e.id = id.get<std::string>();
    e.html = relative_path(member(pages[i], where, "html"), where + "/html");
    e.labels = relative_path(member(pages[i], where, "labels"), where + "/labels");
    const json& sha = member(pages[i], where, "sha256");
    if (!sha.is_string() || sha.get<std::string>().size() != 64)
      throw SchemaError(where + "/sha256", "expected 64 hex digits");
    e.sha256 = sha.get<std::string>();
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<LinkLabel> parse_labels(std::string_view text, const std::string& page_id,
                                    const IndexedDom& dom) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("", "labels of page " + page_id + " are not JSON: " + e.what());
  }
  if (member(doc, "", "format") != kLabelsFormat) throw SchemaError("/format", "expected \"navseg-labels\"");
  if (member(doc, "", "version") != 1) throw SchemaError("/version", "unsupported version");
  const json& pid = member(doc, "", "page_id");
  if (pid != page_id)
    throw ValidationError("labels file names page '" + pid.dump() + "', manifest says '" + page_id + "'");
  const json& links = member(doc, "", "links");
  if (!links.is_array()) throw SchemaError("/links", "expected an array");
  std::vector<LinkLabel> out;
  for (std::size_t i = 0; i < links.size(); ++i) {
    std::string where = "/links/" + std::to_string(i);
    LinkLabel l;
    const json& index = member(links[i], where, "index");
    if (!index.is_number_unsigned() || index.get<std::uint64_t>() > UINT32_MAX)
      throw SchemaError(where + "/index", "expected a DFS index");
    l.index = index.get<std::uint32_t>();
    const json& block = member(links[i], where, "block");
    if (!block.is_number_integer()) throw SchemaError(where + "/block", "expected an integer");
    l.block = block.get<std::int64_t>();
    const json& cat = member(links[i], where, "category");
    if (!cat.is_string()) throw SchemaError(where + "/category", "expected a string");
    try {
      l.category = parse_category(cat.get<std::string>());
    } catch (const SchemaError& e) {
      throw SchemaError(where + "/category", e.what());
    }
    if (auto href = links[i].find("href"); href != links[i].end()) {
      const HyperlinkRef* ref = dom.hyperlink_at(l.index);
      if (!href->is_string()) throw SchemaError(where + "/href", "expected a string");
      if (ref && ref->href != href->get<std::string>())
        throw ValidationError("page " + page_id + ": hyperlink " + std::to_string(l.index) +
                              " has href '" + ref->href + "', labels say '" +
                              href->get<std::string>() + "'");
    }
    out.push_back(l);
  }
  std::sort(out.begin(), out.end(), [](const LinkLabel& a, const LinkLabel& b) { return a.index < b.index; });
  return out;
}

}  // namespace

std::string_view category_name(Category c) {
  switch (c) {
    case Category::kMenu: return "menu";
    case Category::kList: return "list";
    case Category::kContent: return "content";
    case Category::kOther: return "other";
  }
  return "other";
}

Category parse_category(std::string_view name) {
  if (name == "menu") return Category::kMenu;
  if (name == "list") return Category::kList;
  if (name == "content") return Category::kContent;
  if (name == "other") return Category::kOther;
  throw SchemaError("", "unknown category '" + std::string(name) + "'");
}

const CorpusPage* Corpus::find(std::string_view page_id) const {
  auto it = std::lower_bound(pages.begin(), pages.end(), page_id,
                             [](const CorpusPage& p, std::string_view id) { return p.record.page_id < id; });
  if (it == pages.end() || it->record.page_id != page_id) return nullptr;
  return &*it;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 15]);
  }
  return out;
}

void validate_labels(const PageRecord& record, const IndexedDom& dom) {
  const std::string& id = record.page_id;
  std::set<std::uint32_t> seen;
  std::map<std::int64_t, Category> block_category;
  for (const LinkLabel& l : record.labels) {
    if (!dom.hyperlink_at(l.index))
      throw ValidationError("page " + id + ": label index " + std::to_string(l.index) +
                            " is not a hyperlink on the page");
    if (!seen.insert(l.index).second)
      throw ValidationError("page " + id + ": hyperlink " + std::to_string(l.index) + " is labelled twice");
    auto [it, fresh] = block_category.emplace(l.block, l.category);
    if (!fresh && it->second != l.category)
      throw ValidationError("page " + id + ": block " + std::to_string(l.block) +
                            " mixes categories " + std::string(category_name(it->second)) + " and " +
                            std::string(category_name(l.category)));
  }
  for (const auto& h : dom.hyperlinks())
    if (!seen.count(h.index))
      throw ValidationError("page " + id + ": hyperlink " + std::to_string(h.index) + " has no label");
}

Corpus load_corpus(const fs::path& dir, const LoadOptions& options) {
  fs::path manifest_path = dir / "manifest";
  std::vector<ManifestEntry> entries = parse_manifest(read_file(manifest_path));
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < entries.size(); ++i)
    if (entries[i].id == entries[i - 1].id)
      throw ValidationError("duplicate page id '" + entries[i].id + "' in " + manifest_path.string());

  Corpus corpus;
  corpus.pages.resize(entries.size());
  parallel_for(entries.size(), options.jobs, [&](std::size_t i) {
    const ManifestEntry& e = entries[i];
    CorpusPage& page = corpus.pages[i];
    page.html = read_file(dir / e.html);
    std::string digest = sha256_hex(page.html);
    if (digest != e.sha256)
      throw ValidationError("page " + e.id + ": " + (dir / e.html).string() +
                            " does not match its manifest sha256");
    page.dom = parse_page(page.html, options.parse);
    page.record.page_id = e.id;
    page.record.html_path = e.html;
    page.record.sha256 = digest;
    fs::path labels_path = dir / e.labels;
    try {
      page.record.labels = parse_labels(read_file(labels_path), e.id, page.dom);
    } catch (const SchemaError& err) {
      throw SchemaError(labels_path.string() + "#" + err.field_path(), err.what());
    }
    validate_labels(page.record, page.dom);
  });
  return corpus;
}

std::string labels_to_json(const PageRecord& record, const IndexedDom& dom) {
  ordered_json doc;
  doc["format"] = kLabelsFormat;
  doc["version"] = 1;
  doc["page_id"] = record.page_id;
  ordered_json links = ordered_json::array();
  for (const LinkLabel& l : record.labels) {
    ordered_json entry;
    entry["index"] = l.index;
    entry["block"] = l.block;
    entry["category"] = category_name(l.category);
    if (const HyperlinkRef* ref = dom.hyperlink_at(l.index)) entry["href"] = ref->href;
    links.push_back(std::move(entry));
  }
  doc["links"] = std::move(links);
  return doc.dump(1) + "\n";
}

std::string manifest_to_json(const Corpus& corpus) {
  ordered_json doc;
  doc["format"] = kManifestFormat;
  doc["version"] = 1;
  ordered_json pages = ordered_json::array();
  for (const CorpusPage& p : corpus.pages) {
    pages.push_back({{"id", p.record.page_id},
                     {"html", p.record.html_path.generic_string()},
                     {"labels", "labels/" + p.record.page_id + ".labels"},
                     {"sha256", p.record.sha256}});
  }
  doc["pages"] = std::move(pages);
  return doc.dump(2) + "\n";
}

std::string corpus_digest(const Corpus& corpus) { return sha256_hex(manifest_to_json(corpus)); }

void save_corpus(const Corpus& corpus, const fs::path& dir) {
  fs::create_directories(dir / "pages");
  fs::create_directories(dir / "labels");
  for (const CorpusPage& p : corpus.pages) {
    fs::path html = dir / p.record.html_path;
    fs::create_directories(html.parent_path());
    write_file(html, p.html);
    write_file(dir / "labels" / (p.record.page_id + ".labels"), labels_to_json(p.record, p.dom));
  }
  write_file(dir / "manifest", manifest_to_json(corpus));
}

BlockPartition truth_partition(const CorpusPage& page) {
  std::map<std::int64_t, Block> blocks;
  for (const LinkLabel& l : page.record.labels) blocks[l.block].push_back(l.index);
  BlockPartition p;
  p.page_id = page.record.page_id;
  for (auto& [_, b] : blocks) p.blocks.push_back(std::move(b));
  p.canonicalize();
  return p;
}

std::vector<std::uint32_t> truth_navigation(const CorpusPage& page) {
  std::vector<std::uint32_t> out;
  for (const LinkLabel& l : page.record.labels)
    if (is_navigation(l.category)) out.push_back(l.index);
  return out;
}

SplitSpec split_corpus(std::span<const std::string> page_ids, std::uint64_t seed) {
  if (page_ids.size() < 2) throw ContractViolation("splitting needs at least two pages");
  std::vector<std::string> ids(page_ids.begin(), page_ids.end());
  std::sort(ids.begin(), ids.end());
  Rng rng(seed);
  rng.shuffle(std::span<std::string>(ids));
  const std::size_t n_train = (ids.size() + 1) / 2;
  SplitSpec s;
  s.seed = seed;
  s.train_ids.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test_ids.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train), ids.end());
  std::sort(s.train_ids.begin(), s.train_ids.end());
  std::sort(s.test_ids.begin(), s.test_ids.end());
  return s;
}

SplitSpec split_corpus(const Corpus& corpus, std::uint64_t seed) {
  std::vector<std::string> ids;
  for (const auto& p : corpus.pages) ids.push_back(p.record.page_id);
  return split_corpus(ids, seed);
}

// ---------------------------------------------------------------------------
// Synthetic corpus

void GeneratorSpec::validate() const {
  for (const CountRange* r : {&menus, &lists, &links_per_block, &content_paragraphs, &links_per_paragraph,
                              &ads, &prose_words, &spacer_paragraphs})
    if (r->lo > r->hi) throw ContractViolation("generator range has lo > hi");
  if (pages == 0) throw ContractViolation("generator needs at least one page");
  if (links_per_block.lo == 0 && (menus.hi > 0 || lists.hi > 0))
    throw ContractViolation("menus and lists need at least one link");
  if (links_per_paragraph.lo == 0 && content_paragraphs.hi > 0)
    throw ContractViolation("content paragraphs need at least one link");
  if (!valid_page_id(id_prefix)) throw ContractViolation("invalid page id prefix '" + id_prefix + "'");
}

GeneratorSpec prose_heavy_spec() {
  GeneratorSpec s;
  s.id_prefix = "prose";
  s.content_paragraphs = {2, 3};
  s.links_per_paragraph = {2, 3};
  s.prose_words = {40, 70};
  return s;
}

namespace {

constexpr std::string_view kSections[] = {
    "Home",    "News",     "Sports",  "Business", "Science", "Health",  "Travel",  "Opinion",
    "Culture", "Books",    "Music",   "Film",     "Weather", "Video",   "Photos",  "About",
    "Contact", "Archive",  "Events",  "Jobs",     "Shop",    "Help",    "Login",   "Search"};

constexpr std::string_view kWords[] = {
    "city",     "council",  "river",   "report",   "season",  "market",  "local",   "family",
    "school",   "plan",     "water",   "energy",   "road",    "history", "garden",  "museum",
    "study",    "team",     "price",   "winter",   "summer",  "village", "station", "bridge",
    "festival", "harbour",  "library", "project",  "forest",  "county",  "street",  "research",
    "students", "visitors", "budget",  "workers",  "coast",   "island",  "railway", "weekend",
    "morning",  "evening",  "new",     "old",      "first",   "final",   "small",   "large",
    "quiet",    "busy",     "open",    "closed",   "early",   "late",    "public",  "private"};

constexpr std::string_view kGlue[] = {"the", "a",    "of",   "and", "in",   "to",
                                      "for", "with", "from", "on",  "near", "after"};

class PageWriter {
 public:
  explicit PageWriter(Rng& rng) : rng_(rng) {}

  std::uint32_t pick(CountRange r) { return static_cast<std::uint32_t>(rng_.uniform_int(r.lo, r.hi)); }

  std::string word() { return std::string(kWords[rng_.uniform_int(0, std::size(kWords) - 1)]); }

  std::string title_case(std::string w) {
    if (!w.empty() && w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 'a' + 'A');
    return w;
  }

  std::string phrase(std::uint32_t n, bool capitalize) {
    std::string out;
    for (std::uint32_t i = 0; i < n; ++i) {
      if (i) out += ' ';
      std::string w = (i % 3 == 1) ? std::string(kGlue[rng_.uniform_int(0, std::size(kGlue) - 1)]) : word();
      out += (capitalize && i == 0) ? title_case(w) : w;
    }
    return out;
  }

  std::string prose(std::uint32_t n) { return n ? phrase(n, true) + "." : ""; }

  std::uint64_t number() { return rng_.uniform_int(1000, 99999); }

 private:
  Rng& rng_;
};

struct PendingLink {
  std::int64_t block;
  Category category;
};

}  // namespace

Corpus generate_synthetic_corpus(const GeneratorSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  PageWriter w(rng);
  Corpus corpus;
  for (std::uint32_t page_no = 1; page_no <= spec.pages; ++page_no) {
    enum class Kind { kMenu, kList, kParagraph, kAd };
    std::vector<Kind> items;
    for (std::uint32_t i = w.pick(spec.menus); i > 0; --i) items.push_back(Kind::kMenu);
    for (std::uint32_t i = w.pick(spec.lists); i > 0; --i) items.push_back(Kind::kList);
    for (std::uint32_t i = w.pick(spec.content_paragraphs); i > 0; --i) items.push_back(Kind::kParagraph);
    for (std::uint32_t i = w.pick(spec.ads); i > 0; --i) items.push_back(Kind::kAd);
    rng.shuffle(std::span<Kind>(items));

    std::ostringstream html;
    std::vector<PendingLink> links;  // in document order
    std::int64_t next_block = 0;
    std::string title = w.phrase(4, true);
    html << "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>" << title
         << "</title>\n</head>\n<body>\n<h1>" << title << "</h1>\n";

    for (std::size_t item = 0; item < items.size(); ++item) {
      if (item > 0) {
        std::uint32_t paragraphs = w.pick(spec.spacer_paragraphs);
        if (paragraphs > 0) {
          html << "<div class=\"text\">\n";
          for (std::uint32_t p = 0; p < paragraphs; ++p)
            html << "<p>" << w.prose(static_cast<std::uint32_t>(rng.uniform_int(2, 5))) << "</p>\n";
          html << "</div>\n";
        }
      }
      switch (items[item]) {
        case Kind::kMenu: {
          std::int64_t block = next_block++;
          html << "<div class=\"menu\">\n<ul>\n";
          std::uint32_t n = w.pick(spec.links_per_block);
          std::size_t start = rng.uniform_int(0, std::size(kSections) - 1);
          for (std::uint32_t k = 0; k < n; ++k) {
            std::string_view name = kSections[(start + k) % std::size(kSections)];
            std::string slug(name);
            for (char& c : slug) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            html << "<li><a href=\"/section/" << slug << "\">" << name << "</a></li>\n";
            links.push_back({block, Category::kMenu});
          }
          html << "</ul>\n</div>\n";
          break;
        }
        case Kind::kList: {
          std::int64_t block = next_block++;
          html << "<div class=\"list\">\n<h3>" << w.phrase(2, true) << "</h3>\n<ul>\n";
          std::uint32_t n = w.pick(spec.links_per_block);
          for (std::uint32_t k = 0; k < n; ++k) {
            html << "<li><a href=\"/story/" << w.number() << "\">"
                 << w.phrase(static_cast<std::uint32_t>(rng.uniform_int(3, 7)), true) << "</a></li>\n";
            links.push_back({block, Category::kList});
          }
          html << "</ul>\n</div>\n";
          break;
        }
        case Kind::kParagraph: {
          html << "<div class=\"text\">\n<p>" << w.prose(w.pick(spec.prose_words));
          std::uint32_t n = w.pick(spec.links_per_paragraph);
          for (std::uint32_t k = 0; k < n; ++k) {
            html << " <a href=\"https://example.org/" << w.word() << "/" << w.number() << "\">"
                 << w.phrase(static_cast<std::uint32_t>(rng.uniform_int(2, 4)), false) << "</a> "
                 << w.prose(w.pick(spec.prose_words));
            links.push_back({next_block++, Category::kContent});
          }
          html << "</p>\n</div>\n";
          break;
        }
        case Kind::kAd: {
          html << "<div class=\"ad\"><a href=\"https://ads.example.net/click?id=" << w.number()
               << "\"><img src=\"/banners/" << w.number() << ".png\" alt=\"\"></a></div>\n";
          links.push_back({next_block++, Category::kOther});
          break;
        }
      }
    }
    html << "</body>\n</html>\n";

    CorpusPage page;
    char id[64];
    std::snprintf(id, sizeof id, "%s-%03u", spec.id_prefix.c_str(), page_no);
    page.record.page_id = id;
    page.record.html_path = fs::path("pages") / (page.record.page_id + ".html");
    page.html = html.str();
    page.record.sha256 = sha256_hex(page.html);
    page.dom = parse_page(page.html);
    const auto refs = page.dom.hyperlinks();
    if (refs.size() != links.size())
      throw Error("generator produced " + std::to_string(refs.size()) + " hyperlinks, expected " +
                  std::to_string(links.size()));
    for (std::size_t k = 0; k < links.size(); ++k)
      page.record.labels.push_back({refs[k].index, links[k].block, links[k].category});
    corpus.pages.push_back(std::move(page));
  }
  std::sort(corpus.pages.begin(), corpus.pages.end(),
            [](const CorpusPage& a, const CorpusPage& b) { return a.record.page_id < b.record.page_id; });
  return corpus;
}

}  // namespace navseg
