#include "navseg/encoding.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>

#include "html/tokenizer.hpp"
#include "navseg/errors.hpp"

namespace navseg {
namespace {

constexpr std::array<char32_t, 32> kWindows1252High = {
    0x20AC, 0x0081, 0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021, 0x02C6, 0x2030, 0x0160,
    0x2039, 0x0152, 0x008D, 0x017D, 0x008F, 0x0090, 0x2018, 0x2019, 0x201C, 0x201D, 0x2022,
    0x2013, 0x2014, 0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0x009D, 0x017E, 0x0178};

std::string lower_trimmed(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Maps an encoding label to one of the supported encodings. Unsupported
// labels return nullopt and the caller falls back to UTF-8.
std::optional<std::string> canonical_label(std::string_view label) {
  std::string l = lower_trimmed(label);
  if (l == "utf-8" || l == "utf8" || l == "unicode-1-1-utf-8" || l == "x-unicode20utf8")
    return "utf-8";
  if (l == "utf-16" || l == "utf-16le" || l == "unicode" || l == "ucs-2") return "utf-16le";
  if (l == "utf-16be") return "utf-16be";
  static constexpr std::array<std::string_view, 14> kLatin1 = {
      "windows-1252", "cp1252", "x-cp1252", "iso-8859-1", "iso8859-1", "iso_8859-1",
      "iso-ir-100",   "latin1", "l1",       "us-ascii",   "ascii",     "ansi_x3.4-1968",
      "cp819",        "ibm819"};
  if (std::find(kLatin1.begin(), kLatin1.end(), l) != kLatin1.end()) return "windows-1252";
  return std::nullopt;
}

std::optional<std::string> charset_from_content(std::string_view content) {
  std::string lower = lower_trimmed(content);
  auto pos = lower.find("charset");
  if (pos == std::string::npos) return std::nullopt;
  pos += 7;
  while (pos < lower.size() && std::isspace(static_cast<unsigned char>(lower[pos]))) ++pos;
  if (pos >= lower.size() || lower[pos] != '=') return std::nullopt;
  ++pos;
  while (pos < lower.size() && std::isspace(static_cast<unsigned char>(lower[pos]))) ++pos;
  if (pos >= lower.size()) return std::nullopt;
  char q = lower[pos];
  if (q == '"' || q == '\'') {
    auto end = lower.find(q, pos + 1);
    if (end == std::string::npos) return std::nullopt;
    return lower.substr(pos + 1, end - pos - 1);
  }
  auto end = lower.find_first_of(" \t\n\f\r;", pos);
  return lower.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
}

// Simplified meta prescan over the first 1024 bytes.
std::optional<std::string> prescan_meta(std::string_view bytes) {
  std::string_view head = bytes.substr(0, 1024);
  std::size_t pos = 0;
  while (pos < head.size()) {
    if (head.compare(pos, 4, "<!--") == 0) {
      auto end = head.find("-->", pos + 4);
      if (end == std::string_view::npos) return std::nullopt;
      pos = end + 3;
      continue;
    }
    if (head[pos] == '<' && pos + 5 < head.size() &&
        lower_trimmed(head.substr(pos + 1, 4)) == "meta" &&
        (html::is_html_space(head[pos + 5]) || head[pos + 5] == '/')) {
      pos += 5;
      std::optional<std::string> charset, content;
      bool http_equiv = false;
      while (pos < head.size() && head[pos] != '>') {
        while (pos < head.size() && (html::is_html_space(head[pos]) || head[pos] == '/')) ++pos;
        std::string name;
        while (pos < head.size() && !html::is_html_space(head[pos]) && head[pos] != '=' &&
               head[pos] != '>' && head[pos] != '/')
          name.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(head[pos++]))));
        while (pos < head.size() && html::is_html_space(head[pos])) ++pos;
        std::string value;
        if (pos < head.size() && head[pos] == '=') {
          ++pos;
          while (pos < head.size() && html::is_html_space(head[pos])) ++pos;
          if (pos < head.size() && (head[pos] == '"' || head[pos] == '\'')) {
            char q = head[pos++];
            while (pos < head.size() && head[pos] != q) value.push_back(head[pos++]);
            if (pos < head.size()) ++pos;
          } else {
            while (pos < head.size() && !html::is_html_space(head[pos]) && head[pos] != '>')
              value.push_back(head[pos++]);
          }
        }
        if (name.empty()) {
          if (pos < head.size() && head[pos] != '>') ++pos;
          continue;
        }
        if (name == "charset" && !charset) charset = value;
        if (name == "http-equiv" && lower_trimmed(value) == "content-type") http_equiv = true;
        if (name == "content" && !content) content = value;
      }
      std::optional<std::string> label = charset;
      if (!label && http_equiv && content) label = charset_from_content(*content);
      if (label) {
        auto canon = canonical_label(*label);
        // A meta declaration of UTF-16 is treated as UTF-8.
        if (canon && canon->rfind("utf-16", 0) == 0) return "utf-8";
        if (canon) return canon;
        return std::nullopt;
      }
      continue;
    }
    ++pos;
  }
  return std::nullopt;
}

constexpr std::string_view kReplacement = "\xEF\xBF\xBD";

std::string decode_utf8(std::string_view in, DecodePolicy policy, std::size_t base_offset) {
  std::string out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    auto b0 = static_cast<unsigned char>(in[i]);
    if (b0 < 0x80) {
      out.push_back(static_cast<char>(b0));
      ++i;
      continue;
    }
    std::size_t len = 0;
    char32_t cp = 0;
    char32_t min = 0;
    if (b0 >= 0xC2 && b0 <= 0xDF) {
      len = 2;
      cp = b0 & 0x1F;
      min = 0x80;
    } else if (b0 >= 0xE0 && b0 <= 0xEF) {
      len = 3;
      cp = b0 & 0x0F;
      min = 0x800;
    } else if (b0 >= 0xF0 && b0 <= 0xF4) {
      len = 4;
      cp = b0 & 0x07;
      min = 0x10000;
    }
    bool ok = len > 0 && i + len <= in.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      auto b = static_cast<unsigned char>(in[i + k]);
      if ((b & 0xC0) != 0x80) ok = false;
      cp = (cp << 6) | (b & 0x3F);
    }
    if (ok && (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))) ok = false;
    if (!ok) {
      if (policy == DecodePolicy::kStrict)
        throw DecodeError(base_offset + i, "invalid UTF-8 sequence");
      out.append(kReplacement);
      // Skip the lead byte plus any continuation bytes that follow it.
      ++i;
      while (i < in.size() && (static_cast<unsigned char>(in[i]) & 0xC0) == 0x80 &&
             len > 1) {
        ++i;
        --len;
      }
      continue;
    }
    out.append(in.substr(i, len));
    i += len;
  }
  return out;
}

std::string decode_utf16(std::string_view in, bool little_endian, DecodePolicy policy,
                         std::size_t base_offset) {
  std::string out;
  std::size_t i = 0;
  auto unit_at = [&](std::size_t k) -> char32_t {
    auto lo = static_cast<unsigned char>(in[k]);
    auto hi = static_cast<unsigned char>(in[k + 1]);
    return little_endian ? static_cast<char32_t>(lo | (hi << 8))
                         : static_cast<char32_t>(hi | (lo << 8));
  };
  auto fail = [&](std::size_t at, const char* what) {
    if (policy == DecodePolicy::kStrict) throw DecodeError(base_offset + at, what);
    out.append(kReplacement);
  };
  while (i + 1 < in.size()) {
    char32_t u = unit_at(i);
    if (u >= 0xD800 && u <= 0xDBFF) {
      if (i + 3 < in.size()) {
        char32_t v = unit_at(i + 2);
        if (v >= 0xDC00 && v <= 0xDFFF) {
          html::append_utf8(out, 0x10000 + ((u - 0xD800) << 10) + (v - 0xDC00));
          i += 4;
          continue;
        }
      }
      fail(i, "unpaired UTF-16 surrogate");
      i += 2;
      continue;
    }
    if (u >= 0xDC00 && u <= 0xDFFF) {
      fail(i, "unpaired UTF-16 surrogate");
      i += 2;
      continue;
    }
    html::append_utf8(out, u);
    i += 2;
  }
  if (i < in.size()) fail(i, "truncated UTF-16 code unit");
  return out;
}

std::string decode_windows1252(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  for (char c : in) {
    auto b = static_cast<unsigned char>(c);
    if (b < 0x80)
      out.push_back(c);
    else if (b < 0xA0)
      html::append_utf8(out, kWindows1252High[b - 0x80]);
    else
      html::append_utf8(out, b);
  }
  return out;
}

bool is_unicode_space(char32_t cp) {
  return (cp >= 0x09 && cp <= 0x0D) || cp == 0x20 || cp == 0x85 || cp == 0xA0 || cp == 0x1680 ||
         (cp >= 0x2000 && cp <= 0x200A) || cp == 0x2028 || cp == 0x2029 || cp == 0x202F ||
         cp == 0x205F || cp == 0x3000;
}

}  // namespace

std::string sniff_encoding(std::string_view bytes) {
  if (bytes.substr(0, 3) == "\xEF\xBB\xBF") return "utf-8";
  if (bytes.substr(0, 2) == "\xFF\xFE") return "utf-16le";
  if (bytes.substr(0, 2) == "\xFE\xFF") return "utf-16be";
  return prescan_meta(bytes).value_or("utf-8");
}

DecodedText decode_html_bytes(std::string_view bytes, DecodePolicy policy) {
  DecodedText result;
  result.encoding = sniff_encoding(bytes);
  std::size_t bom = 0;
  if (bytes.substr(0, 3) == "\xEF\xBB\xBF")
    bom = 3;
  else if (bytes.substr(0, 2) == "\xFF\xFE" || bytes.substr(0, 2) == "\xFE\xFF")
    bom = 2;
  std::string_view body = bytes.substr(bom);
  if (result.encoding == "utf-8")
    result.utf8 = decode_utf8(body, policy, bom);
  else if (result.encoding == "utf-16le")
    result.utf8 = decode_utf16(body, true, policy, bom);
  else if (result.encoding == "utf-16be")
    result.utf8 = decode_utf16(body, false, policy, bom);
  else
    result.utf8 = decode_windows1252(body);
  return result;
}

std::size_t count_words(std::string_view utf8) {
  std::size_t words = 0;
  bool in_word = false;
  std::size_t i = 0;
  while (i < utf8.size()) {
    auto b0 = static_cast<unsigned char>(utf8[i]);
    char32_t cp = b0;
    std::size_t len = 1;
    if (b0 >= 0xC0 && b0 < 0xE0 && i + 1 < utf8.size()) {
      cp = ((b0 & 0x1F) << 6) | (static_cast<unsigned char>(utf8[i + 1]) & 0x3F);
      len = 2;
    } else if (b0 >= 0xE0 && b0 < 0xF0 && i + 2 < utf8.size()) {
      cp = ((b0 & 0x0F) << 12) | ((static_cast<unsigned char>(utf8[i + 1]) & 0x3F) << 6) |
           (static_cast<unsigned char>(utf8[i + 2]) & 0x3F);
      len = 3;
    } else if (b0 >= 0xF0 && i + 3 < utf8.size()) {
      cp = 0x10000;  // no astral code point is whitespace
      len = 4;
    }
    bool space = is_unicode_space(cp);
    if (!space && !in_word) ++words;
    in_word = !space;
    i += len;
  }
  return words;
}

}  // namespace navseg
