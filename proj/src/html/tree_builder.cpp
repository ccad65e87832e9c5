// HTML5 tree construction. Follows the WHATWG insertion-mode state machine
// closely enough to reproduce browser trees for the markup found on ordinary
// pages: implied html/head/body, auto-closed paragraphs and list items, table
// repair with foster parenting, active formatting reconstruction and the
// adoption agency algorithm. Frameset documents and template contents are
// handled coarsely.

#include <algorithm>
#include <cctype>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "html/tokenizer.hpp"
#include "navseg/html.hpp"

namespace navseg::html {
namespace {

using Type = Token::Type;

bool in(std::string_view name, std::initializer_list<std::string_view> set) {
  return std::find(set.begin(), set.end(), name) != set.end();
}

bool is_special(const Node& n) {
  if (n.foreign) return in(n.name, {"mi", "mo", "mn", "ms", "mtext", "annotation-xml",
                                    "foreignObject", "desc", "title"});
  return in(n.name,
            {"address", "applet", "area", "article", "aside", "base", "basefont", "bgsound",
             "blockquote", "body", "br", "button", "caption", "center", "col", "colgroup", "dd",
             "details", "dir", "div", "dl", "dt", "embed", "fieldset", "figcaption", "figure",
             "footer", "form", "frame", "frameset", "h1", "h2", "h3", "h4", "h5", "h6", "head",
             "header", "hgroup", "hr", "html", "iframe", "img", "input", "keygen", "li", "link",
             "listing", "main", "marquee", "menu", "meta", "nav", "noembed", "noframes",
             "noscript", "object", "ol", "p", "param", "plaintext", "pre", "script", "search",
             "section", "select", "source", "style", "summary", "table", "tbody", "td",
             "template", "textarea", "tfoot", "th", "thead", "title", "tr", "track", "ul", "wbr",
             "xmp"});
}

bool is_formatting(std::string_view name) {
  return in(name, {"a", "b", "big", "code", "em", "font", "i", "nobr", "s", "small", "strike",
                   "strong", "tt", "u"});
}

bool is_heading(std::string_view name) {
  return in(name, {"h1", "h2", "h3", "h4", "h5", "h6"});
}

bool is_all_space(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return is_html_space(c); });
}

enum class Mode {
  kInitial,
  kBeforeHtml,
  kBeforeHead,
  kInHead,
  kInHeadNoscript,
  kAfterHead,
  kInBody,
  kText,
  kInTable,
  kInCaption,
  kInColumnGroup,
  kInTableBody,
  kInRow,
  kInCell,
  kInSelect,
  kInSelectInTable,
  kAfterBody,
  kInFrameset,
  kAfterFrameset,
  kAfterAfterBody,
};

enum class Scope { kDefault, kListItem, kButton, kTable, kSelect };

constexpr int kMarker = -1;

class TreeBuilder {
 public:
  explicit TreeBuilder(std::string_view input) : tokenizer_(input) {
    Node doc;
    doc.type = NodeType::kDocument;
    doc_.nodes.push_back(std::move(doc));
  }

 private:
  // ---- tree primitives -------------------------------------------------

  Node& node(int id) { return doc_.nodes[static_cast<std::size_t>(id)]; }
  int current() const { return stack_.back(); }
  const std::string& name_of(int id) const { return doc_.nodes[static_cast<std::size_t>(id)].name; }
  bool is_html_named(int id, std::string_view n) const {
    const Node& x = doc_.nodes[static_cast<std::size_t>(id)];
    return x.type == NodeType::kElement && !x.foreign && x.name == n;
  }

  int create_element(const Token& tok, bool foreign = false) {
    Node n;
    n.type = NodeType::kElement;
    n.name = tok.name;
    n.attributes = tok.attributes;
    n.foreign = foreign;
    doc_.nodes.push_back(std::move(n));
    return static_cast<int>(doc_.nodes.size()) - 1;
  }

  void detach(int child) {
    int parent = node(child).parent;
    if (parent < 0) return;
    auto& siblings = node(parent).children;
    siblings.erase(std::find(siblings.begin(), siblings.end(), child));
    node(child).parent = -1;
  }

  void append_child(int parent, int child) {
    detach(child);
    node(parent).children.push_back(child);
    node(child).parent = parent;
  }

  void insert_before(int parent, int child, int reference) {
    detach(child);
    auto& siblings = node(parent).children;
    auto it = std::find(siblings.begin(), siblings.end(), reference);
    siblings.insert(it, child);
    node(child).parent = parent;
  }

  struct Place {
    int parent;
    int before = -1;  // insert before this child, or append when -1
  };

  Place appropriate_place(std::optional<int> override_target = std::nullopt) {
    int target = override_target.value_or(current());
    if (foster_parenting_ &&
        in(name_of(target), {"table", "tbody", "tfoot", "thead", "tr"}) && !node(target).foreign) {
      for (int i = static_cast<int>(stack_.size()) - 1; i >= 0; --i) {
        int candidate = stack_[static_cast<std::size_t>(i)];
        if (is_html_named(candidate, "template")) return {candidate};
        if (is_html_named(candidate, "table")) {
          if (node(candidate).parent >= 0) return {node(candidate).parent, candidate};
          return {stack_[static_cast<std::size_t>(i - 1)]};
        }
      }
      return {stack_.front()};
    }
    return {target};
  }

  void place_node(int id, const Place& place) {
    if (place.before >= 0)
      insert_before(place.parent, id, place.before);
    else
      append_child(place.parent, id);
  }

  int insert_element(const Token& tok, bool foreign = false) {
    int id = create_element(tok, foreign);
    place_node(id, appropriate_place());
    stack_.push_back(id);
    return id;
  }

  int insert_html_element(std::string_view name) {
    Token t;
    t.type = Type::kStartTag;
    t.name = std::string(name);
    return insert_element(t);
  }

  void insert_characters(std::string_view text) {
    Place place = appropriate_place();
    if (node(place.parent).type == NodeType::kDocument) return;
    auto& kids = node(place.parent).children;
    int prev = -1;
    if (place.before >= 0) {
      auto it = std::find(kids.begin(), kids.end(), place.before);
      if (it != kids.begin()) prev = *(it - 1);
    } else if (!kids.empty()) {
      prev = kids.back();
    }
    if (prev >= 0 && node(prev).type == NodeType::kText) {
      node(prev).data.append(text);
      return;
    }
    Node n;
    n.type = NodeType::kText;
    n.data = std::string(text);
    doc_.nodes.push_back(std::move(n));
    place_node(static_cast<int>(doc_.nodes.size()) - 1, place);
  }

  void insert_comment(const Token& tok, std::optional<int> parent = std::nullopt) {
    Node n;
    n.type = NodeType::kComment;
    n.data = tok.data;
    doc_.nodes.push_back(std::move(n));
    int id = static_cast<int>(doc_.nodes.size()) - 1;
    if (parent)
      append_child(*parent, id);
    else
      place_node(id, appropriate_place());
  }

  // ---- stack queries ---------------------------------------------------

  bool is_scope_boundary(int id, Scope scope) const {
    const Node& n = doc_.nodes[static_cast<std::size_t>(id)];
    if (scope == Scope::kSelect) return !(!n.foreign && in(n.name, {"optgroup", "option"}));
    if (scope == Scope::kTable) return !n.foreign && in(n.name, {"html", "table", "template"});
    if (n.foreign)
      return in(n.name, {"mi", "mo", "mn", "ms", "mtext", "annotation-xml", "foreignObject",
                         "desc", "title"});
    if (in(n.name, {"applet", "caption", "html", "table", "td", "th", "marquee", "object",
                    "template"}))
      return true;
    if (scope == Scope::kListItem && in(n.name, {"ol", "ul"})) return true;
    if (scope == Scope::kButton && n.name == "button") return true;
    return false;
  }

  bool has_in_scope(std::string_view name, Scope scope = Scope::kDefault) const {
    for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) {
      if (is_html_named(*it, name)) return true;
      if (is_scope_boundary(*it, scope)) return false;
    }
    return false;
  }

  bool has_node_in_scope(int target) const {
    for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) {
      if (*it == target) return true;
      if (is_scope_boundary(*it, Scope::kDefault)) return false;
    }
    return false;
  }

  bool has_heading_in_scope() const {
    for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) {
      const Node& n = doc_.nodes[static_cast<std::size_t>(*it)];
      if (!n.foreign && is_heading(n.name)) return true;
      if (is_scope_boundary(*it, Scope::kDefault)) return false;
    }
    return false;
  }

  bool stack_contains(int id) const { return std::find(stack_.begin(), stack_.end(), id) != stack_.end(); }

  void pop_until(std::string_view name) {
    while (!stack_.empty()) {
      int id = stack_.back();
      stack_.pop_back();
      if (is_html_named(id, name)) return;
    }
  }

  void pop_until_heading() {
    while (!stack_.empty()) {
      int id = stack_.back();
      stack_.pop_back();
      if (!node(id).foreign && is_heading(name_of(id))) return;
    }
  }

  void generate_implied_end_tags(std::string_view except = {}) {
    while (!stack_.empty()) {
      const Node& n = node(current());
      if (n.foreign || n.name == except) return;
      if (!in(n.name, {"dd", "dt", "li", "optgroup", "option", "p", "rb", "rp", "rt", "rtc"}))
        return;
      stack_.pop_back();
    }
  }

  void close_p_if_in_button_scope() {
    if (has_in_scope("p", Scope::kButton)) {
      generate_implied_end_tags("p");
      pop_until("p");
    }
  }

  void clear_stack_to(std::initializer_list<std::string_view> names) {
    while (!stack_.empty() && !(in(name_of(current()), names) && !node(current()).foreign))
      stack_.pop_back();
  }

  // ---- active formatting elements --------------------------------------

  void push_formatting(int id) {
    // Noah's Ark: at most three entries with identical name and attributes.
    int matches = 0;
    int earliest = -1;
    for (int i = static_cast<int>(formatting_.size()) - 1; i >= 0; --i) {
      int e = formatting_[static_cast<std::size_t>(i)];
      if (e == kMarker) break;
      if (name_of(e) == name_of(id) && node(e).attributes == node(id).attributes) {
        ++matches;
        earliest = i;
      }
    }
    if (matches >= 3) formatting_.erase(formatting_.begin() + earliest);
    formatting_.push_back(id);
  }

  void reconstruct_formatting() {
    if (formatting_.empty()) return;
    int last = formatting_.back();
    if (last == kMarker || stack_contains(last)) return;
    std::size_t i = formatting_.size() - 1;
    while (i > 0) {
      int prev = formatting_[i - 1];
      if (prev == kMarker || stack_contains(prev)) break;
      --i;
    }
    for (; i < formatting_.size(); ++i) {
      const Node& old = node(formatting_[i]);
      Token t;
      t.type = Type::kStartTag;
      t.name = old.name;
      t.attributes = old.attributes;
      formatting_[i] = insert_element(t);
    }
  }

  void clear_formatting_to_marker() {
    while (!formatting_.empty()) {
      int e = formatting_.back();
      formatting_.pop_back();
      if (e == kMarker) return;
    }
  }

  void remove_formatting(int id) {
    auto it = std::find(formatting_.begin(), formatting_.end(), id);
    if (it != formatting_.end()) formatting_.erase(it);
  }

  int formatting_after_marker(std::string_view name) const {
    for (auto it = formatting_.rbegin(); it != formatting_.rend(); ++it) {
      if (*it == kMarker) return -1;
      if (name_of(*it) == name) return *it;
    }
    return -1;
  }

  // Returns false when the caller should fall back to "any other end tag".
  bool adoption_agency(std::string_view subject) {
    if (is_html_named(current(), subject) &&
        std::find(formatting_.begin(), formatting_.end(), current()) == formatting_.end()) {
      stack_.pop_back();
      return true;
    }
    for (int outer = 0; outer < 8; ++outer) {
      int fe = formatting_after_marker(subject);
      if (fe < 0) return false;
      if (!stack_contains(fe)) {
        remove_formatting(fe);
        return true;
      }
      if (!has_node_in_scope(fe)) return true;
      auto fe_pos = std::find(stack_.begin(), stack_.end(), fe);
      int furthest = -1;
      for (auto it = fe_pos + 1; it != stack_.end(); ++it) {
        if (is_special(node(*it))) {
          furthest = *it;
          break;
        }
      }
      if (furthest < 0) {
        stack_.erase(fe_pos, stack_.end());
        remove_formatting(fe);
        return true;
      }
      int common_ancestor = *(fe_pos - 1);
      auto bookmark = std::find(formatting_.begin(), formatting_.end(), fe) - formatting_.begin();
      int node_id = furthest;
      int last_node = furthest;
      auto stack_index = [&](int id) {
        return std::find(stack_.begin(), stack_.end(), id) - stack_.begin();
      };
      auto node_index = stack_index(node_id);
      for (int inner = 1;; ++inner) {
        --node_index;
        node_id = stack_[static_cast<std::size_t>(node_index)];
        if (node_id == fe) break;
        auto af = std::find(formatting_.begin(), formatting_.end(), node_id);
        if (inner > 3 && af != formatting_.end()) {
          if (af - formatting_.begin() < bookmark) --bookmark;
          formatting_.erase(af);
          af = formatting_.end();
        }
        if (af == formatting_.end()) {
          stack_.erase(stack_.begin() + node_index);
          continue;
        }
        Token t;
        t.type = Type::kStartTag;
        t.name = node(node_id).name;
        t.attributes = node(node_id).attributes;
        int replacement = create_element(t);
        *af = replacement;
        stack_[static_cast<std::size_t>(node_index)] = replacement;
        node_id = replacement;
        if (last_node == furthest) bookmark = (af - formatting_.begin()) + 1;
        append_child(node_id, last_node);
        last_node = node_id;
      }
      place_node(last_node, appropriate_place(common_ancestor));
      Token t;
      t.type = Type::kStartTag;
      t.name = node(fe).name;
      t.attributes = node(fe).attributes;
      int fresh = create_element(t);
      std::vector<int> moved = node(furthest).children;
      for (int child : moved) append_child(fresh, child);
      append_child(furthest, fresh);
      auto old = std::find(formatting_.begin(), formatting_.end(), fe) - formatting_.begin();
      formatting_.insert(formatting_.begin() + bookmark, fresh);
      if (old >= bookmark) ++old;
      formatting_.erase(formatting_.begin() + old);
      stack_.erase(std::find(stack_.begin(), stack_.end(), fe));
      stack_.insert(stack_.begin() + stack_index(furthest) + 1, fresh);
    }
    return true;
  }

  // ---- mode helpers ----------------------------------------------------

  void reset_insertion_mode() {
    for (int i = static_cast<int>(stack_.size()) - 1; i >= 0; --i) {
      int id = stack_[static_cast<std::size_t>(i)];
      bool last = i == 0;
      const std::string& n = name_of(id);
      if (n == "select") {
        for (int j = i - 1; j > 0; --j) {
          int anc = stack_[static_cast<std::size_t>(j)];
          if (is_html_named(anc, "template")) break;
          if (is_html_named(anc, "table")) {
            mode_ = Mode::kInSelectInTable;
            return;
          }
        }
        mode_ = Mode::kInSelect;
        return;
      }
      if ((n == "td" || n == "th") && !last) {
        mode_ = Mode::kInCell;
        return;
      }
      if (n == "tr") {
        mode_ = Mode::kInRow;
        return;
      }
      if (n == "tbody" || n == "thead" || n == "tfoot") {
        mode_ = Mode::kInTableBody;
        return;
      }
      if (n == "caption") {
        mode_ = Mode::kInCaption;
        return;
      }
      if (n == "colgroup") {
        mode_ = Mode::kInColumnGroup;
        return;
      }
      if (n == "table") {
        mode_ = Mode::kInTable;
        return;
      }
      if (n == "template") {
        mode_ = Mode::kInBody;
        return;
      }
      if (n == "head" && !last) {
        mode_ = Mode::kInHead;
        return;
      }
      if (n == "body") {
        mode_ = Mode::kInBody;
        return;
      }
      if (n == "frameset") {
        mode_ = Mode::kInFrameset;
        return;
      }
      if (n == "html") {
        mode_ = head_ < 0 ? Mode::kBeforeHead : Mode::kAfterHead;
        return;
      }
      if (last) {
        mode_ = Mode::kInBody;
        return;
      }
    }
    mode_ = Mode::kInBody;
  }

  void start_raw_text(const Token& tok, TextMode text_mode) {
    insert_element(tok);
    tokenizer_.set_mode(text_mode, tok.name);
    original_mode_ = mode_;
    mode_ = Mode::kText;
  }

  // ---- dispatch --------------------------------------------------------

  bool use_foreign_rules(const Token& tok) const {
    if (stack_.empty()) return false;
    const Node& adjusted = doc_.nodes[static_cast<std::size_t>(current())];
    if (!adjusted.foreign) return false;
    if (tok.type == Type::kEof) return false;
    // HTML integration points hand ordinary tokens back to the HTML rules.
    if (in(adjusted.name, {"foreignObject", "desc", "title"}) &&
        (tok.type == Type::kCharacters || tok.type == Type::kStartTag))
      return false;
    if (adjusted.name == "annotation-xml" && tok.type == Type::kStartTag && tok.name == "svg")
      return false;
    if (in(adjusted.name, {"mi", "mo", "mn", "ms", "mtext"}) &&
        (tok.type == Type::kCharacters ||
         (tok.type == Type::kStartTag && tok.name != "mglyph" && tok.name != "malignmark")))
      return false;
    return true;
  }

  void dispatch(Token& tok) {
    if (use_foreign_rules(tok))
      process_foreign(tok);
    else
      process(tok, mode_);
  }

  void process(Token& tok, Mode mode) {
    switch (mode) {
      case Mode::kInitial: return initial(tok);
      case Mode::kBeforeHtml: return before_html(tok);
      case Mode::kBeforeHead: return before_head(tok);
      case Mode::kInHead: return in_head(tok);
      case Mode::kInHeadNoscript: return in_head_noscript(tok);
      case Mode::kAfterHead: return after_head(tok);
      case Mode::kInBody: return in_body(tok);
      case Mode::kText: return text(tok);
      case Mode::kInTable: return in_table(tok);
      case Mode::kInCaption: return in_caption(tok);
      case Mode::kInColumnGroup: return in_column_group(tok);
      case Mode::kInTableBody: return in_table_body(tok);
      case Mode::kInRow: return in_row(tok);
      case Mode::kInCell: return in_cell(tok);
      case Mode::kInSelect: return in_select(tok);
      case Mode::kInSelectInTable: return in_select_in_table(tok);
      case Mode::kAfterBody: return after_body(tok);
      case Mode::kInFrameset: return in_frameset(tok);
      case Mode::kAfterFrameset: return after_frameset(tok);
      case Mode::kAfterAfterBody: return after_after_body(tok);
    }
  }

  void reprocess(Token& tok) { dispatch(tok); }

  bool is_space_chars(const Token& tok) const {
    return tok.type == Type::kCharacters && is_all_space(tok.data);
  }

  void initial(Token& tok) {
    if (is_space_chars(tok)) return;
    if (tok.type == Type::kComment) return insert_comment(tok, 0);
    mode_ = Mode::kBeforeHtml;
    if (tok.type == Type::kDoctype) return;
    reprocess(tok);
  }

  void before_html(Token& tok) {
    if (tok.type == Type::kDoctype || is_space_chars(tok)) return;
    if (tok.type == Type::kComment) return insert_comment(tok, 0);
    if (tok.type == Type::kStartTag && tok.name == "html") {
      int id = create_element(tok);
      append_child(0, id);
      stack_.push_back(id);
      mode_ = Mode::kBeforeHead;
      return;
    }
    if (tok.type == Type::kEndTag && !in(tok.name, {"head", "body", "html", "br"})) return;
    Token html;
    html.type = Type::kStartTag;
    html.name = "html";
    int id = create_element(html);
    append_child(0, id);
    stack_.push_back(id);
    mode_ = Mode::kBeforeHead;
    reprocess(tok);
  }

  void before_head(Token& tok) {
    if (tok.type == Type::kDoctype || is_space_chars(tok)) return;
    if (tok.type == Type::kComment) return insert_comment(tok);
    if (tok.type == Type::kStartTag && tok.name == "html") return in_body(tok);
    if (tok.type == Type::kStartTag && tok.name == "head") {
      head_ = insert_element(tok);
      mode_ = Mode::kInHead;
      return;
    }
    if (tok.type == Type::kEndTag && !in(tok.name, {"head", "body", "html", "br"})) return;
    head_ = insert_html_element("head");
    mode_ = Mode::kInHead;
    reprocess(tok);
  }

  void in_head(Token& tok) {
    if (is_space_chars(tok)) return insert_characters(tok.data);
    if (tok.type == Type::kComment) return insert_comment(tok);
    if (tok.type == Type::kDoctype) return;
    if (tok.type == Type::kStartTag) {
      const std::string& n = tok.name;
      if (n == "html") return in_body(tok);
      if (in(n, {"base", "basefont", "bgsound", "link", "meta"})) {
        insert_element(tok);
        stack_.pop_back();
        return;
      }
      if (n == "title") return start_raw_text(tok, TextMode::kRcdata);
      if (n == "noscript") {
        insert_element(tok);
        mode_ = Mode::kInHeadNoscript;
        return;
      }
      if (n == "noframes" || n == "style") return start_raw_text(tok, TextMode::kRawtext);
      if (n == "script") return start_raw_text(tok, TextMode::kScriptData);
      if (n == "template") {
        insert_element(tok);
        formatting_.push_back(kMarker);
        frameset_ok_ = false;
        mode_ = Mode::kInBody;
        return;
      }
      if (n == "head") return;
    }
    if (tok.type == Type::kEndTag) {
      if (tok.name == "head") {
        stack_.pop_back();
        mode_ = Mode::kAfterHead;
        return;
      }
      if (tok.name == "template") return end_template();
      if (!in(tok.name, {"body", "html", "br"})) return;
    }
    stack_.pop_back();
    mode_ = Mode::kAfterHead;
    reprocess(tok);
  }

  void end_template() {
    bool found = false;
    for (int id : stack_) found = found || is_html_named(id, "template");
    if (!found) return;
    generate_implied_end_tags();
    pop_until("template");
    clear_formatting_to_marker();
    reset_insertion_mode();
  }

  void in_head_noscript(Token& tok) {
    if (tok.type == Type::kDoctype) return;
    if (tok.type == Type::kStartTag && tok.name == "html") return in_body(tok);
    if (tok.type == Type::kEndTag && tok.name == "noscript") {
      stack_.pop_back();
      mode_ = Mode::kInHead;
      return;
    }
    if (is_space_chars(tok) || tok.type == Type::kComment ||
        (tok.type == Type::kStartTag &&
         in(tok.name, {"basefont", "bgsound", "link", "meta", "noframes", "style"})))
      return in_head(tok);
    if (tok.type == Type::kStartTag && in(tok.name, {"head", "noscript"})) return;
    if (tok.type == Type::kEndTag && tok.name != "br") return;
    stack_.pop_back();
    mode_ = Mode::kInHead;
    reprocess(tok);
  }

  void after_head(Token& tok) {
    if (is_space_chars(tok)) return insert_characters(tok.data);
    if (tok.type == Type::kComment) return insert_comment(tok);
    if (tok.type == Type::kDoctype) return;
    if (tok.type == Type::kStartTag) {
      const std::string& n = tok.name;
      if (n == "html") return in_body(tok);
      if (n == "body") {
        insert_element(tok);
        frameset_ok_ = false;
        mode_ = Mode::kInBody;
        return;
      }
      if (n == "frameset") {
        insert_element(tok);
        mode_ = Mode::kInFrameset;
        return;
      }
      if (in(n, {"base", "basefont", "bgsound", "link", "meta", "noframes", "script", "style",
                 "template", "title"})) {
        stack_.push_back(head_);
        in_head(tok);
        auto it = std::find(stack_.begin(), stack_.end(), head_);
        if (it != stack_.end()) stack_.erase(it);
        return;
      }
      if (n == "head") return;
    }
    if (tok.type == Type::kEndTag) {
      if (tok.name == "template") return in_head(tok);
      if (!in(tok.name, {"body", "html", "br"})) return;
    }
    insert_html_element("body");
    mode_ = Mode::kInBody;
    reprocess(tok);
  }

  int body_element() const {
    if (stack_.size() > 1 && is_html_named(stack_[1], "body")) return stack_[1];
    return -1;
  }

  void in_body(Token& tok) {
    switch (tok.type) {
      case Type::kCharacters:
        reconstruct_formatting();
        insert_characters(tok.data);
        if (!is_all_space(tok.data)) frameset_ok_ = false;
        return;
      case Type::kComment:
        return insert_comment(tok);
      case Type::kDoctype:
        return;
      case Type::kEof:
        return;
      case Type::kStartTag:
        return in_body_start(tok);
      case Type::kEndTag:
        return in_body_end(tok);
    }
  }

  void in_body_start(Token& tok) {
    const std::string n = tok.name;
    if (n == "html") {
      for (auto& a : tok.attributes) {
        auto& attrs = node(stack_.front()).attributes;
        if (std::none_of(attrs.begin(), attrs.end(), [&](const Attribute& x) { return x.name == a.name; }))
          attrs.push_back(a);
      }
      return;
    }
    if (in(n, {"base", "basefont", "bgsound", "link", "meta", "noframes", "script", "style",
               "template", "title"}))
      return in_head(tok);
    if (n == "body") {
      int body = body_element();
      if (body < 0) return;
      frameset_ok_ = false;
      for (auto& a : tok.attributes) {
        auto& attrs = node(body).attributes;
        if (std::none_of(attrs.begin(), attrs.end(), [&](const Attribute& x) { return x.name == a.name; }))
          attrs.push_back(a);
      }
      return;
    }
    if (n == "frameset") return;
    if (in(n, {"address", "article", "aside", "blockquote", "center", "details", "dialog", "dir",
               "div", "dl", "fieldset", "figcaption", "figure", "footer", "header", "hgroup",
               "main", "menu", "nav", "ol", "p", "search", "section", "summary", "ul"})) {
      close_p_if_in_button_scope();
      insert_element(tok);
      return;
    }
    if (is_heading(n)) {
      close_p_if_in_button_scope();
      if (!node(current()).foreign && is_heading(name_of(current()))) stack_.pop_back();
      insert_element(tok);
      return;
    }
    if (n == "pre" || n == "listing") {
      close_p_if_in_button_scope();
      insert_element(tok);
      skip_newline_ = true;
      frameset_ok_ = false;
      return;
    }
    if (n == "form") {
      bool in_template = false;
      for (int id : stack_) in_template = in_template || is_html_named(id, "template");
      if (form_ >= 0 && !in_template) return;
      close_p_if_in_button_scope();
      int id = insert_element(tok);
      if (!in_template) form_ = id;
      return;
    }
    if (n == "li" || n == "dd" || n == "dt") {
      frameset_ok_ = false;
      for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) {
        const Node& x = node(*it);
        bool match = !x.foreign && (n == "li" ? x.name == "li" : (x.name == "dd" || x.name == "dt"));
        if (match) {
          std::string target = x.name;
          generate_implied_end_tags(target);
          pop_until(target);
          break;
        }
        if (is_special(x) && !(!x.foreign && in(x.name, {"address", "div", "p"}))) break;
      }
      close_p_if_in_button_scope();
      insert_element(tok);
      return;
    }
    if (n == "plaintext") {
      close_p_if_in_button_scope();
      insert_element(tok);
      tokenizer_.set_mode(TextMode::kPlaintext);
      return;
    }
    if (n == "button") {
      if (has_in_scope("button")) {
        generate_implied_end_tags();
        pop_until("button");
      }
      reconstruct_formatting();
      insert_element(tok);
      frameset_ok_ = false;
      return;
    }
    if (n == "a") {
      int existing = formatting_after_marker("a");
      if (existing >= 0) {
        adoption_agency("a");
        remove_formatting(existing);
        auto it = std::find(stack_.begin(), stack_.end(), existing);
        if (it != stack_.end()) stack_.erase(it);
      }
      reconstruct_formatting();
      push_formatting(insert_element(tok));
      return;
    }
    if (is_formatting(n) && n != "nobr") {
      reconstruct_formatting();
      push_formatting(insert_element(tok));
      return;
    }
    if (n == "nobr") {
      reconstruct_formatting();
      if (has_in_scope("nobr")) {
        adoption_agency("nobr");
        reconstruct_formatting();
      }
      push_formatting(insert_element(tok));
      return;
    }
    if (in(n, {"applet", "marquee", "object"})) {
      reconstruct_formatting();
      insert_element(tok);
      formatting_.push_back(kMarker);
      frameset_ok_ = false;
      return;
    }
    if (n == "table") {
      close_p_if_in_button_scope();
      insert_element(tok);
      frameset_ok_ = false;
      mode_ = Mode::kInTable;
      return;
    }
    if (in(n, {"area", "br", "embed", "img", "keygen", "wbr", "input"})) {
      reconstruct_formatting();
      insert_element(tok);
      stack_.pop_back();
      const std::string* type = tok.attribute("type");
      if (n != "input" || !type || !equals_ci(*type, "hidden")) frameset_ok_ = false;
      return;
    }
    if (in(n, {"param", "source", "track"})) {
      insert_element(tok);
      stack_.pop_back();
      return;
    }
    if (n == "hr") {
      close_p_if_in_button_scope();
      insert_element(tok);
      stack_.pop_back();
      frameset_ok_ = false;
      return;
    }
    if (n == "image") {
      tok.name = "img";
      return reprocess(tok);
    }
    if (n == "textarea") {
      insert_element(tok);
      tokenizer_.set_mode(TextMode::kRcdata, "textarea");
      skip_newline_ = true;
      original_mode_ = mode_;
      frameset_ok_ = false;
      mode_ = Mode::kText;
      return;
    }
    if (n == "xmp") {
      close_p_if_in_button_scope();
      reconstruct_formatting();
      frameset_ok_ = false;
      return start_raw_text(tok, TextMode::kRawtext);
    }
    if (n == "iframe") {
      frameset_ok_ = false;
      return start_raw_text(tok, TextMode::kRawtext);
    }
    if (n == "noembed") return start_raw_text(tok, TextMode::kRawtext);
    if (n == "select") {
      reconstruct_formatting();
      insert_element(tok);
      frameset_ok_ = false;
      if (in_table_mode())
        mode_ = Mode::kInSelectInTable;
      else
        mode_ = Mode::kInSelect;
      return;
    }
    if (n == "optgroup" || n == "option") {
      if (is_html_named(current(), "option")) stack_.pop_back();
      reconstruct_formatting();
      insert_element(tok);
      return;
    }
    if (n == "rb" || n == "rtc") {
      if (has_in_scope("ruby")) generate_implied_end_tags();
      insert_element(tok);
      return;
    }
    if (n == "rp" || n == "rt") {
      if (has_in_scope("ruby")) generate_implied_end_tags("rtc");
      insert_element(tok);
      return;
    }
    if (n == "math" || n == "svg") {
      reconstruct_formatting();
      insert_element(tok, true);
      if (tok.self_closing) stack_.pop_back();
      return;
    }
    if (in(n, {"caption", "col", "colgroup", "frame", "head", "tbody", "td", "tfoot", "th",
               "thead", "tr"}))
      return;
    reconstruct_formatting();
    insert_element(tok);
  }

  bool in_table_mode() const {
    return mode_ == Mode::kInTable || mode_ == Mode::kInCaption || mode_ == Mode::kInTableBody ||
           mode_ == Mode::kInRow || mode_ == Mode::kInCell;
  }

  static bool equals_ci(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i])))
        return false;
    return true;
  }

  void in_body_end(Token& tok) {
    const std::string n = tok.name;
    if (n == "template") return end_template();
    if (n == "body") {
      if (!has_in_scope("body")) return;
      mode_ = Mode::kAfterBody;
      return;
    }
    if (n == "html") {
      if (!has_in_scope("body")) return;
      mode_ = Mode::kAfterBody;
      return reprocess(tok);
    }
    if (in(n, {"address", "article", "aside", "blockquote", "button", "center", "details",
               "dialog", "dir", "div", "dl", "fieldset", "figcaption", "figure", "footer",
               "header", "hgroup", "listing", "main", "menu", "nav", "ol", "pre", "search",
               "section", "summary", "ul"})) {
      if (!has_in_scope(n)) return;
      generate_implied_end_tags();
      pop_until(n);
      return;
    }
    if (n == "form") {
      int f = form_;
      form_ = -1;
      if (f < 0 || !has_node_in_scope(f)) return;
      generate_implied_end_tags();
      stack_.erase(std::find(stack_.begin(), stack_.end(), f));
      return;
    }
    if (n == "p") {
      if (!has_in_scope("p", Scope::kButton)) insert_html_element("p");
      generate_implied_end_tags("p");
      pop_until("p");
      return;
    }
    if (n == "li") {
      if (!has_in_scope("li", Scope::kListItem)) return;
      generate_implied_end_tags("li");
      pop_until("li");
      return;
    }
    if (n == "dd" || n == "dt") {
      if (!has_in_scope(n)) return;
      generate_implied_end_tags(n);
      pop_until(n);
      return;
    }
    if (is_heading(n)) {
      if (!has_heading_in_scope()) return;
      generate_implied_end_tags();
      pop_until_heading();
      return;
    }
    if (is_formatting(n)) {
      if (adoption_agency(n)) return;
      return any_other_end_tag(n);
    }
    if (in(n, {"applet", "marquee", "object"})) {
      if (!has_in_scope(n)) return;
      generate_implied_end_tags();
      pop_until(n);
      clear_formatting_to_marker();
      return;
    }
    if (n == "br") {
      Token br;
      br.type = Type::kStartTag;
      br.name = "br";
      return in_body_start(br);
    }
    any_other_end_tag(n);
  }

  void any_other_end_tag(std::string_view n) {
    for (int i = static_cast<int>(stack_.size()) - 1; i >= 0; --i) {
      int id = stack_[static_cast<std::size_t>(i)];
      if (is_html_named(id, n)) {
        generate_implied_end_tags(n);
        stack_.resize(static_cast<std::size_t>(i));
        return;
      }
      if (is_special(node(id))) return;
    }
  }

  void text(Token& tok) {
    if (tok.type == Type::kCharacters) return insert_characters(tok.data);
    if (tok.type == Type::kEof) {
      stack_.pop_back();
      mode_ = original_mode_;
      return reprocess(tok);
    }
    if (tok.type == Type::kEndTag) {
      stack_.pop_back();
      mode_ = original_mode_;
    }
  }

  void in_table(Token& tok) {
    if (tok.type == Type::kCharacters &&
        in(name_of(current()), {"table", "tbody", "template", "tfoot", "thead", "tr"})) {
      if (is_all_space(tok.data)) return insert_characters(tok.data);
      foster_parenting_ = true;
      in_body(tok);
      foster_parenting_ = false;
      return;
    }
    if (tok.type == Type::kComment) return insert_comment(tok);
    if (tok.type == Type::kDoctype) return;
    if (tok.type == Type::kStartTag) {
      const std::string& n = tok.name;
      if (n == "caption") {
        clear_stack_to({"table", "template", "html"});
        formatting_.push_back(kMarker);
        insert_element(tok);
        mode_ = Mode::kInCaption;
        return;
      }
      if (n == "colgroup") {
        clear_stack_to({"table", "template", "html"});
        insert_element(tok);
        mode_ = Mode::kInColumnGroup;
        return;
      }
      if (n == "col") {
        clear_stack_to({"table", "template", "html"});
        insert_html_element("colgroup");
        mode_ = Mode::kInColumnGroup;
        return reprocess(tok);
      }
      if (in(n, {"tbody", "tfoot", "thead"})) {
        clear_stack_to({"table", "template", "html"});
        insert_element(tok);
        mode_ = Mode::kInTableBody;
        return;
      }
      if (in(n, {"td", "th", "tr"})) {
        clear_stack_to({"table", "template", "html"});
        insert_html_element("tbody");
        mode_ = Mode::kInTableBody;
        return reprocess(tok);
      }
      if (n == "table") {
        if (!has_in_scope("table", Scope::kTable)) return;
        pop_until("table");
        reset_insertion_mode();
        return reprocess(tok);
      }
      if (in(n, {"style", "script", "template"})) return in_head(tok);
      if (n == "input") {
        const std::string* type = tok.attribute("type");
        if (type && equals_ci(*type, "hidden")) {
          insert_element(tok);
          stack_.pop_back();
          return;
        }
      }
      if (n == "form") {
        if (form_ >= 0) return;
        form_ = insert_element(tok);
        stack_.pop_back();
        return;
      }
    }
    if (tok.type == Type::kEndTag) {
      const std::string& n = tok.name;
      if (n == "table") {
        if (!has_in_scope("table", Scope::kTable)) return;
        pop_until("table");
        reset_insertion_mode();
        return;
      }
      if (in(n, {"body", "caption", "col", "colgroup", "html", "tbody", "td", "tfoot", "th",
                 "thead", "tr"}))
        return;
      if (n == "template") return in_head(tok);
    }
    if (tok.type == Type::kEof) return in_body(tok);
    foster_parenting_ = true;
    in_body(tok);
    foster_parenting_ = false;
  }

  void close_caption() {
    generate_implied_end_tags();
    pop_until("caption");
    clear_formatting_to_marker();
    mode_ = Mode::kInTable;
  }

  void in_caption(Token& tok) {
    if (tok.type == Type::kEndTag && tok.name == "caption") {
      if (!has_in_scope("caption", Scope::kTable)) return;
      return close_caption();
    }
    if ((tok.type == Type::kStartTag &&
         in(tok.name, {"caption", "col", "colgroup", "tbody", "td", "tfoot", "th", "thead", "tr"})) ||
        (tok.type == Type::kEndTag && tok.name == "table")) {
      if (!has_in_scope("caption", Scope::kTable)) return;
      close_caption();
      return reprocess(tok);
    }
    if (tok.type == Type::kEndTag &&
        in(tok.name, {"body", "col", "colgroup", "html", "tbody", "td", "tfoot", "th", "thead", "tr"}))
      return;
    in_body(tok);
  }

  void in_column_group(Token& tok) {
    if (is_space_chars(tok)) return insert_characters(tok.data);
    if (tok.type == Type::kComment) return insert_comment(tok);
    if (tok.type == Type::kDoctype) return;
    if (tok.type == Type::kStartTag && tok.name == "html") return in_body(tok);
    if (tok.type == Type::kStartTag && tok.name == "col") {
      insert_element(tok);
      stack_.pop_back();
      return;
    }
    if (tok.type == Type::kEndTag && tok.name == "colgroup") {
      if (!is_html_named(current(), "colgroup")) return;
      stack_.pop_back();
      mode_ = Mode::kInTable;
      return;
    }
    if (tok.type == Type::kEndTag && tok.name == "col") return;
    if ((tok.type == Type::kStartTag || tok.type == Type::kEndTag) && tok.name == "template")
      return in_head(tok);
    if (tok.type == Type::kEof) return in_body(tok);
    if (!is_html_named(current(), "colgroup")) return;
    stack_.pop_back();
    mode_ = Mode::kInTable;
    reprocess(tok);
  }

  bool any_in_table_scope(std::initializer_list<std::string_view> names) const {
    for (auto n : names)
      if (has_in_scope(n, Scope::kTable)) return true;
    return false;
  }

  void in_table_body(Token& tok) {
    if (tok.type == Type::kStartTag && tok.name == "tr") {
      clear_stack_to({"tbody", "tfoot", "thead", "template", "html"});
      insert_element(tok);
      mode_ = Mode::kInRow;
      return;
    }
    if (tok.type == Type::kStartTag && (tok.name == "th" || tok.name == "td")) {
      clear_stack_to({"tbody", "tfoot", "thead", "template", "html"});
      insert_html_element("tr");
      mode_ = Mode::kInRow;
      return reprocess(tok);
    }
    if (tok.type == Type::kEndTag && in(tok.name, {"tbody", "tfoot", "thead"})) {
      if (!has_in_scope(tok.name, Scope::kTable)) return;
      clear_stack_to({"tbody", "tfoot", "thead", "template", "html"});
      stack_.pop_back();
      mode_ = Mode::kInTable;
      return;
    }
    if ((tok.type == Type::kStartTag &&
         in(tok.name, {"caption", "col", "colgroup", "tbody", "tfoot", "thead"})) ||
        (tok.type == Type::kEndTag && tok.name == "table")) {
      if (!any_in_table_scope({"tbody", "thead", "tfoot"})) return;
      clear_stack_to({"tbody", "tfoot", "thead", "template", "html"});
      stack_.pop_back();
      mode_ = Mode::kInTable;
      return reprocess(tok);
    }
    if (tok.type == Type::kEndTag &&
        in(tok.name, {"body", "caption", "col", "colgroup", "html", "td", "th", "tr"}))
      return;
    in_table(tok);
  }

  void in_row(Token& tok) {
    if (tok.type == Type::kStartTag && (tok.name == "th" || tok.name == "td")) {
      clear_stack_to({"tr", "template", "html"});
      insert_element(tok);
      mode_ = Mode::kInCell;
      formatting_.push_back(kMarker);
      return;
    }
    if (tok.type == Type::kEndTag && tok.name == "tr") {
      if (!has_in_scope("tr", Scope::kTable)) return;
      clear_stack_to({"tr", "template", "html"});
      stack_.pop_back();
      mode_ = Mode::kInTableBody;
      return;
    }
    if ((tok.type == Type::kStartTag &&
         in(tok.name, {"caption", "col", "colgroup", "tbody", "tfoot", "thead", "tr"})) ||
        (tok.type == Type::kEndTag && tok.name == "table")) {
      if (!has_in_scope("tr", Scope::kTable)) return;
      clear_stack_to({"tr", "template", "html"});
      stack_.pop_back();
      mode_ = Mode::kInTableBody;
      return reprocess(tok);
    }
    if (tok.type == Type::kEndTag && in(tok.name, {"tbody", "tfoot", "thead"})) {
      if (!has_in_scope(tok.name, Scope::kTable)) return;
      if (!has_in_scope("tr", Scope::kTable)) return;
      clear_stack_to({"tr", "template", "html"});
      stack_.pop_back();
      mode_ = Mode::kInTableBody;
      return reprocess(tok);
    }
    if (tok.type == Type::kEndTag &&
        in(tok.name, {"body", "caption", "col", "colgroup", "html", "td", "th"}))
      return;
    in_table(tok);
  }

  void close_cell() {
    generate_implied_end_tags();
    while (!stack_.empty()) {
      int id = stack_.back();
      stack_.pop_back();
      if (is_html_named(id, "td") || is_html_named(id, "th")) break;
    }
    clear_formatting_to_marker();
    mode_ = Mode::kInRow;
  }

  void in_cell(Token& tok) {
    if (tok.type == Type::kEndTag && (tok.name == "td" || tok.name == "th")) {
      if (!has_in_scope(tok.name, Scope::kTable)) return;
      generate_implied_end_tags();
      pop_until(tok.name);
      clear_formatting_to_marker();
      mode_ = Mode::kInRow;
      return;
    }
    if (tok.type == Type::kStartTag &&
        in(tok.name, {"caption", "col", "colgroup", "tbody", "td", "tfoot", "th", "thead", "tr"})) {
      if (!any_in_table_scope({"td", "th"})) return;
      close_cell();
      return reprocess(tok);
    }
    if (tok.type == Type::kEndTag && in(tok.name, {"body", "caption", "col", "colgroup", "html"}))
      return;
    if (tok.type == Type::kEndTag && in(tok.name, {"table", "tbody", "tfoot", "thead", "tr"})) {
      if (!has_in_scope(tok.name, Scope::kTable)) return;
      close_cell();
      return reprocess(tok);
    }
    in_body(tok);
  }

  void in_select(Token& tok) {
    switch (tok.type) {
      case Type::kCharacters:
        return insert_characters(tok.data);
      case Type::kComment:
        return insert_comment(tok);
      case Type::kDoctype:
        return;
      case Type::kEof:
        return in_body(tok);
      case Type::kStartTag: {
        const std::string& n = tok.name;
        if (n == "html") return in_body(tok);
        if (n == "option") {
          if (is_html_named(current(), "option")) stack_.pop_back();
          insert_element(tok);
          return;
        }
        if (n == "optgroup") {
          if (is_html_named(current(), "option")) stack_.pop_back();
          if (is_html_named(current(), "optgroup")) stack_.pop_back();
          insert_element(tok);
          return;
        }
        if (n == "hr") {
          if (is_html_named(current(), "option")) stack_.pop_back();
          if (is_html_named(current(), "optgroup")) stack_.pop_back();
          insert_element(tok);
          stack_.pop_back();
          return;
        }
        if (n == "select") {
          if (!has_in_scope("select", Scope::kSelect)) return;
          pop_until("select");
          reset_insertion_mode();
          return;
        }
        if (in(n, {"input", "keygen", "textarea"})) {
          if (!has_in_scope("select", Scope::kSelect)) return;
          pop_until("select");
          reset_insertion_mode();
          return reprocess(tok);
        }
        if (n == "script" || n == "template") return in_head(tok);
        return;
      }
      case Type::kEndTag: {
        const std::string& n = tok.name;
        if (n == "optgroup") {
          if (is_html_named(current(), "option") && stack_.size() > 1 &&
              is_html_named(stack_[stack_.size() - 2], "optgroup"))
            stack_.pop_back();
          if (is_html_named(current(), "optgroup")) stack_.pop_back();
          return;
        }
        if (n == "option") {
          if (is_html_named(current(), "option")) stack_.pop_back();
          return;
        }
        if (n == "select") {
          if (!has_in_scope("select", Scope::kSelect)) return;
          pop_until("select");
          reset_insertion_mode();
          return;
        }
        if (n == "template") return in_head(tok);
        return;
      }
    }
  }

  void in_select_in_table(Token& tok) {
    auto table_tag = [](std::string_view n) {
      return in(n, {"caption", "table", "tbody", "tfoot", "thead", "tr", "td", "th"});
    };
    if (tok.type == Type::kStartTag && table_tag(tok.name)) {
      pop_until("select");
      reset_insertion_mode();
      return reprocess(tok);
    }
    if (tok.type == Type::kEndTag && table_tag(tok.name)) {
      if (!has_in_scope(tok.name, Scope::kTable)) return;
      pop_until("select");
      reset_insertion_mode();
      return reprocess(tok);
    }
    in_select(tok);
  }

  void after_body(Token& tok) {
    if (is_space_chars(tok)) return in_body(tok);
    if (tok.type == Type::kComment) return insert_comment(tok, stack_.front());
    if (tok.type == Type::kDoctype) return;
    if (tok.type == Type::kStartTag && tok.name == "html") return in_body(tok);
    if (tok.type == Type::kEndTag && tok.name == "html") {
      mode_ = Mode::kAfterAfterBody;
      return;
    }
    if (tok.type == Type::kEof) return;
    mode_ = Mode::kInBody;
    reprocess(tok);
  }

  void in_frameset(Token& tok) {
    if (is_space_chars(tok)) return insert_characters(tok.data);
    if (tok.type == Type::kComment) return insert_comment(tok);
    if (tok.type == Type::kStartTag) {
      if (tok.name == "html") return in_body(tok);
      if (tok.name == "frameset") {
        insert_element(tok);
        return;
      }
      if (tok.name == "frame") {
        insert_element(tok);
        stack_.pop_back();
        return;
      }
      if (tok.name == "noframes") return in_head(tok);
    }
    if (tok.type == Type::kEndTag && tok.name == "frameset") {
      if (stack_.size() > 1) stack_.pop_back();
      if (!is_html_named(current(), "frameset")) mode_ = Mode::kAfterFrameset;
    }
  }

  void after_frameset(Token& tok) {
    if (is_space_chars(tok)) return insert_characters(tok.data);
    if (tok.type == Type::kComment) return insert_comment(tok);
    if (tok.type == Type::kStartTag && tok.name == "html") return in_body(tok);
    if (tok.type == Type::kStartTag && tok.name == "noframes") return in_head(tok);
    if (tok.type == Type::kEndTag && tok.name == "html") mode_ = Mode::kAfterAfterBody;
  }

  void after_after_body(Token& tok) {
    if (tok.type == Type::kComment) return insert_comment(tok, 0);
    if (tok.type == Type::kDoctype || is_space_chars(tok) ||
        (tok.type == Type::kStartTag && tok.name == "html"))
      return in_body(tok);
    if (tok.type == Type::kEof) return;
    if (body_element() < 0) return;  // frameset documents
    mode_ = Mode::kInBody;
    reprocess(tok);
  }

  void process_foreign(Token& tok) {
    if (tok.type == Type::kCharacters) return insert_characters(tok.data);
    if (tok.type == Type::kComment) return insert_comment(tok);
    if (tok.type == Type::kDoctype) return;
    if (tok.type == Type::kStartTag) {
      bool breakout =
          in(tok.name, {"b", "big", "blockquote", "body", "br", "center", "code", "dd", "div",
                        "dl", "dt", "em", "embed", "h1", "h2", "h3", "h4", "h5", "h6", "head",
                        "hr", "i", "img", "li", "listing", "menu", "meta", "nobr", "ol", "p",
                        "pre", "ruby", "s", "small", "span", "strong", "strike", "sub", "sup",
                        "table", "tt", "u", "ul", "var"}) ||
          (tok.name == "font" &&
           (tok.attribute("color") || tok.attribute("face") || tok.attribute("size")));
      if (breakout) {
        while (stack_.size() > 1 && node(current()).foreign &&
               !in(name_of(current()), {"foreignObject", "desc", "title", "mi", "mo", "mn",
                                        "ms", "mtext"}))
          stack_.pop_back();
        return process(tok, mode_);
      }
      insert_element(tok, true);
      if (tok.self_closing) stack_.pop_back();
      return;
    }
    if (tok.type == Type::kEndTag) {
      if (tok.name == "br" || tok.name == "p") return process(tok, mode_);
      for (int i = static_cast<int>(stack_.size()) - 1; i > 0; --i) {
        int id = stack_[static_cast<std::size_t>(i)];
        if (equals_ci(name_of(id), tok.name)) {
          stack_.resize(static_cast<std::size_t>(i));
          return;
        }
        if (!node(id).foreign) return process(tok, mode_);
      }
    }
  }

  void skip_leading_newline(Token& tok) {
    if (tok.type == Type::kCharacters && !tok.data.empty() && tok.data.front() == '\n')
      tok.data.erase(0, 1);
  }

  Tokenizer tokenizer_;
  Document doc_;
  std::vector<int> stack_;
  std::vector<int> formatting_;
  Mode mode_ = Mode::kInitial;
  Mode original_mode_ = Mode::kInBody;
  int head_ = -1;
  int form_ = -1;
  bool frameset_ok_ = true;
  bool foster_parenting_ = false;
  bool skip_newline_ = false;

 public:
  // Token pump that honours the "ignore a leading newline" rule for
  // <pre>, <listing> and <textarea>.
  Document build() {
    while (true) {
      tokenizer_.set_foreign_context(!stack_.empty() && node(current()).foreign);
      Token tok = tokenizer_.next();
      if (skip_newline_) {
        skip_newline_ = false;
        skip_leading_newline(tok);
        if (tok.type == Type::kCharacters && tok.data.empty()) continue;
      }
      dispatch(tok);
      if (tok.type == Type::kEof) break;
    }
    return std::move(doc_);
  }
};

// Normalizes CR and CRLF to LF as the input stream preprocessor does.
std::string normalize_newlines(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i] == '\r') {
      out.push_back('\n');
      if (i + 1 < in.size() && in[i + 1] == '\n') ++i;
    } else {
      out.push_back(in[i]);
    }
  }
  return out;
}

}  // namespace

int Document::html_element() const {
  for (int child : nodes.front().children)
    if (nodes[static_cast<std::size_t>(child)].type == NodeType::kElement) return child;
  return -1;
}

Document parse_document(std::string_view utf8) {
  std::string input = normalize_newlines(utf8);
  TreeBuilder builder(input);
  return builder.build();
}

}  // namespace navseg::html
