#include "html/tokenizer.hpp"

#include <array>
#include <cctype>

#include "html/entities.hpp"

namespace navseg::html {
namespace {

bool is_ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_ascii_alnum(char c) { return is_ascii_alpha(c) || (c >= '0' && c <= '9'); }
char to_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

constexpr std::string_view kReplacement = "\xEF\xBF\xBD";

// Numeric references in 0x80..0x9F are reinterpreted as windows-1252.
constexpr std::array<char32_t, 32> kC1Replacements = {
    0x20AC, 0x0081, 0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021, 0x02C6, 0x2030, 0x0160,
    0x2039, 0x0152, 0x008D, 0x017D, 0x008F, 0x0090, 0x2018, 0x2019, 0x201C, 0x201D, 0x2022,
    0x2013, 0x2014, 0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0x009D, 0x017E, 0x0178};

// Appends `text` split into alternating whitespace / non-whitespace tokens.
void push_split_characters(std::deque<Token>& out, std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    bool space = is_html_space(text[i]);
    std::size_t j = i;
    while (j < text.size() && is_html_space(text[j]) == space) ++j;
    Token t;
    t.type = Token::Type::kCharacters;
    t.data.assign(text.substr(i, j - i));
    out.push_back(std::move(t));
    i = j;
  }
}

}  // namespace

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

Tokenizer::Tokenizer(std::string_view input) : input_(input) {}

void Tokenizer::set_mode(TextMode mode, std::string end_tag) {
  mode_ = mode;
  end_tag_ = std::move(end_tag);
}

bool Tokenizer::starts_with_ci(std::string_view s) const {
  if (input_.size() - pos_ < s.size()) return false;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (to_lower(input_[pos_ + i]) != to_lower(s[i])) return false;
  return true;
}

Token Tokenizer::characters(std::string text) {
  Token t;
  t.type = Token::Type::kCharacters;
  t.data = std::move(text);
  return t;
}

Token Tokenizer::next() {
  while (pending_.empty()) {
    if (at_end()) {
      Token eof;
      eof.type = Token::Type::kEof;
      return eof;
    }
    Token tok;
    switch (mode_) {
      case TextMode::kData:
        tok = lex_data();
        break;
      case TextMode::kRcdata:
        tok = lex_raw(true);
        break;
      case TextMode::kRawtext:
      case TextMode::kScriptData:
        tok = lex_raw(false);
        break;
      case TextMode::kPlaintext:
        tok = lex_plaintext();
        break;
    }
    if (tok.type == Token::Type::kCharacters) {
      push_split_characters(pending_, tok.data);
    } else {
      pending_.push_back(std::move(tok));
    }
  }
  Token t = std::move(pending_.front());
  pending_.pop_front();
  return t;
}

Token Tokenizer::lex_data() {
  std::string text;
  while (!at_end()) {
    char c = peek();
    if (c == '<') {
      char n = peek(1);
      if (n == '!' || n == '/' || n == '?' || is_ascii_alpha(n)) {
        if (!text.empty()) return characters(std::move(text));
        ++pos_;
        if (n == '!') {
          ++pos_;
          return lex_markup_declaration();
        }
        if (n == '?') return lex_bogus_comment();
        if (n == '/') {
          ++pos_;
          char a = peek();
          if (is_ascii_alpha(a)) return lex_tag(true);
          if (a == '>') {
            ++pos_;
            continue;  // "</>" is dropped
          }
          if (at_end()) return characters("</");
          return lex_bogus_comment();
        }
        return lex_tag(false);
      }
      text.push_back(c);
      ++pos_;
    } else if (c == '&') {
      ++pos_;
      append_char_ref(text, false);
    } else if (c == '\0') {
      ++pos_;  // NUL in data is a parse error and is dropped
    } else {
      text.push_back(c);
      ++pos_;
    }
  }
  return characters(std::move(text));
}

// RCDATA / RAWTEXT / script data: everything up to the appropriate end tag.
Token Tokenizer::lex_raw(bool decode_refs) {
  std::string text;
  while (!at_end()) {
    char c = peek();
    if (c == '<' && peek(1) == '/') {
      std::size_t save = pos_;
      pos_ += 2;
      if (starts_with_ci(end_tag_)) {
        char after = peek(end_tag_.size());
        if (is_html_space(after) || after == '/' || after == '>') {
          if (!text.empty()) {
            pos_ = save;
            return characters(std::move(text));
          }
          mode_ = TextMode::kData;
          return lex_tag(true);
        }
      }
      pos_ = save;
      text.push_back(c);
      ++pos_;
    } else if (c == '&' && decode_refs) {
      ++pos_;
      append_char_ref(text, false);
    } else if (c == '\0') {
      text.append(kReplacement);
      ++pos_;
    } else {
      text.push_back(c);
      ++pos_;
    }
  }
  return characters(std::move(text));
}

Token Tokenizer::lex_plaintext() {
  std::string text;
  for (; !at_end(); ++pos_) {
    if (peek() == '\0')
      text.append(kReplacement);
    else
      text.push_back(peek());
  }
  return characters(std::move(text));
}

Token Tokenizer::lex_markup_declaration() {
  if (starts_with_ci("--")) {
    pos_ += 2;
    return lex_comment();
  }
  if (starts_with_ci("doctype")) {
    pos_ += 7;
    return lex_doctype();
  }
  if (input_.substr(pos_, 7) == "[CDATA[") {
    pos_ += 7;
    if (foreign_) {
      auto end = input_.find("]]>", pos_);
      std::string text(input_.substr(pos_, end == std::string_view::npos ? std::string_view::npos
                                                                          : end - pos_));
      pos_ = end == std::string_view::npos ? input_.size() : end + 3;
      return characters(std::move(text));
    }
    pos_ -= 7;
    Token t = lex_bogus_comment();
    return t;
  }
  return lex_bogus_comment();
}

Token Tokenizer::lex_bogus_comment() {
  Token t;
  t.type = Token::Type::kComment;
  auto end = input_.find('>', pos_);
  if (end == std::string_view::npos) end = input_.size();
  t.data.assign(input_.substr(pos_, end - pos_));
  pos_ = std::min(end + 1, input_.size());
  return t;
}

Token Tokenizer::lex_comment() {
  Token t;
  t.type = Token::Type::kComment;
  // "<!-->" and "<!--->" are abruptly closed empty comments.
  if (peek() == '>') {
    ++pos_;
    return t;
  }
  if (peek() == '-' && peek(1) == '>') {
    pos_ += 2;
    return t;
  }
  while (!at_end()) {
    if (peek() == '-' && peek(1) == '-') {
      if (peek(2) == '>') {
        pos_ += 3;
        return t;
      }
      if (peek(2) == '!' && peek(3) == '>') {
        pos_ += 4;
        return t;
      }
    }
    if (peek() == '\0')
      t.data.append(kReplacement);
    else
      t.data.push_back(peek());
    ++pos_;
  }
  return t;
}

Token Tokenizer::lex_doctype() {
  Token t;
  t.type = Token::Type::kDoctype;
  while (!at_end() && is_html_space(peek())) ++pos_;
  while (!at_end() && !is_html_space(peek()) && peek() != '>') {
    t.name.push_back(to_lower(peek()));
    ++pos_;
  }
  // Public and system identifiers do not influence the tree we build.
  auto end = input_.find('>', pos_);
  pos_ = end == std::string_view::npos ? input_.size() : end + 1;
  return t;
}

Token Tokenizer::lex_tag(bool end_tag) {
  Token t;
  t.type = end_tag ? Token::Type::kEndTag : Token::Type::kStartTag;
  while (!at_end()) {
    char c = peek();
    if (is_html_space(c) || c == '/' || c == '>') break;
    if (c == '\0')
      t.name.append(kReplacement);
    else
      t.name.push_back(to_lower(c));
    ++pos_;
  }
  lex_attributes(t);
  if (t.type == Token::Type::kEof) return t;
  if (end_tag) {
    t.attributes.clear();
    t.self_closing = false;
  }
  return t;
}

void Tokenizer::lex_attributes(Token& tok) {
  while (true) {
    while (!at_end() && (is_html_space(peek()) || peek() == '/')) {
      if (peek() == '/' && peek(1) == '>') {
        pos_ += 2;
        tok.self_closing = true;
        return;
      }
      ++pos_;
    }
    if (at_end()) {
      // EOF inside a tag drops the tag.
      tok = Token{};
      tok.type = Token::Type::kEof;
      return;
    }
    if (peek() == '>') {
      ++pos_;
      return;
    }
    Attribute attr;
    // The first character may be '=' (a parse error that still starts a name).
    attr.name.push_back(to_lower(peek()));
    ++pos_;
    while (!at_end()) {
      char c = peek();
      if (is_html_space(c) || c == '/' || c == '>' || c == '=') break;
      if (c == '\0')
        attr.name.append(kReplacement);
      else
        attr.name.push_back(to_lower(c));
      ++pos_;
    }
    while (!at_end() && is_html_space(peek())) ++pos_;
    if (peek() == '=') {
      ++pos_;
      while (!at_end() && is_html_space(peek())) ++pos_;
      char q = peek();
      if (q == '"' || q == '\'') {
        ++pos_;
        while (!at_end() && peek() != q) {
          if (peek() == '&') {
            ++pos_;
            append_char_ref(attr.value, true);
          } else if (peek() == '\0') {
            attr.value.append(kReplacement);
            ++pos_;
          } else {
            attr.value.push_back(peek());
            ++pos_;
          }
        }
        if (!at_end()) ++pos_;
      } else {
        while (!at_end() && !is_html_space(peek()) && peek() != '>') {
          if (peek() == '&') {
            ++pos_;
            append_char_ref(attr.value, true);
          } else if (peek() == '\0') {
            attr.value.append(kReplacement);
            ++pos_;
          } else {
            attr.value.push_back(peek());
            ++pos_;
          }
        }
      }
    }
    bool duplicate = false;
    for (const auto& a : tok.attributes) duplicate = duplicate || a.name == attr.name;
    if (!duplicate) tok.attributes.push_back(std::move(attr));
  }
}

// Called with pos_ just past '&'. Appends either the decoded reference or the
// literal text.
void Tokenizer::append_char_ref(std::string& out, bool in_attribute) {
  char c = peek();
  if (c == '#') {
    std::size_t start = pos_;
    ++pos_;
    bool hex = false;
    if (peek() == 'x' || peek() == 'X') {
      hex = true;
      ++pos_;
    }
    std::size_t digits_start = pos_;
    std::uint64_t value = 0;
    while (!at_end()) {
      char d = peek();
      int digit;
      if (d >= '0' && d <= '9')
        digit = d - '0';
      else if (hex && d >= 'a' && d <= 'f')
        digit = d - 'a' + 10;
      else if (hex && d >= 'A' && d <= 'F')
        digit = d - 'A' + 10;
      else
        break;
      value = value * (hex ? 16 : 10) + static_cast<std::uint64_t>(digit);
      if (value > 0x10FFFF) value = 0x110000;  // saturate
      ++pos_;
    }
    if (pos_ == digits_start) {
      pos_ = start;
      out.push_back('&');
      return;
    }
    if (peek() == ';') ++pos_;
    char32_t cp = static_cast<char32_t>(value);
    if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      out.append(kReplacement);
    } else if (cp >= 0x80 && cp <= 0x9F) {
      append_utf8(out, kC1Replacements[cp - 0x80]);
    } else {
      append_utf8(out, cp);
    }
    return;
  }
  if (!is_ascii_alnum(c)) {
    out.push_back('&');
    return;
  }
  auto match = match_named_entity(input_.substr(pos_));
  if (!match) {
    out.push_back('&');
    return;
  }
  bool terminated = match->name.back() == ';';
  if (!terminated && in_attribute) {
    char after = peek(match->name.size());
    if (after == '=' || is_ascii_alnum(after)) {
      out.push_back('&');
      return;
    }
  }
  out.append(match->value);
  pos_ += match->name.size();
}

}  // namespace navseg::html
