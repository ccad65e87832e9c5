#pragma once

#include <cstddef>
#include <deque>
#include <string>
#include <string_view>
#include <vector>

#include "navseg/html.hpp"

namespace navseg::html {

struct Token {
  enum class Type { kDoctype, kStartTag, kEndTag, kComment, kCharacters, kEof };

  Type type = Type::kEof;
  std::string name;  // tag or doctype name
  std::vector<Attribute> attributes;
  bool self_closing = false;
  std::string data;  // characters or comment text

  const std::string* attribute(std::string_view key) const {
    for (const auto& a : attributes)
      if (a.name == key) return &a.value;
    return nullptr;
  }
};

/// Content model the tree builder can switch the tokenizer into.
enum class TextMode { kData, kRcdata, kRawtext, kScriptData, kPlaintext };

/// Pull tokenizer. Character tokens are split so that each one is either
/// entirely HTML whitespace or contains no leading whitespace run the tree
/// builder would need to separate.
class Tokenizer {
 public:
  explicit Tokenizer(std::string_view input);

  Token next();

  /// Switch content model; `end_tag` is the element whose end tag terminates
  /// raw text.
  void set_mode(TextMode mode, std::string end_tag = {});

  /// Whether the current adjusted node is foreign (enables CDATA sections).
  void set_foreign_context(bool foreign) { foreign_ = foreign; }

 private:
  bool at_end() const { return pos_ >= input_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < input_.size() ? input_[pos_ + ahead] : '\0';
  }
  bool starts_with_ci(std::string_view s) const;

  Token lex_data();
  Token lex_raw(bool decode_refs);
  Token lex_plaintext();
  Token lex_markup_declaration();
  Token lex_tag(bool end_tag);
  Token lex_bogus_comment();
  Token lex_comment();
  Token lex_doctype();
  void lex_attributes(Token& tok);

  void append_char_ref(std::string& out, bool in_attribute);
  static Token characters(std::string text);

  std::string_view input_;
  std::size_t pos_ = 0;
  TextMode mode_ = TextMode::kData;
  std::string end_tag_;
  bool foreign_ = false;
  std::deque<Token> pending_;
};

/// Appends the UTF-8 encoding of `cp`.
void append_utf8(std::string& out, char32_t cp);

}  // namespace navseg::html
