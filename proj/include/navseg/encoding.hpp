#pragma once

#include <string>
#include <string_view>

namespace navseg {

enum class DecodePolicy {
  kLossy,   // malformed sequences become U+FFFD
  kStrict,  // malformed sequences raise DecodeError
};

struct DecodedText {
  std::string utf8;
  std::string encoding;  // canonical name of the encoding used
};

/// Picks the encoding for a page: byte-order mark first, then a declared
/// <meta charset> / http-equiv content type within the first 1024 bytes, then
/// UTF-8. Returns one of "utf-8", "utf-16le", "utf-16be", "windows-1252".
std::string sniff_encoding(std::string_view bytes);

/// Decodes `bytes` to UTF-8 using the sniffed encoding. Throws DecodeError
/// (with the byte offset of the first bad sequence) only under kStrict.
DecodedText decode_html_bytes(std::string_view bytes, DecodePolicy policy = DecodePolicy::kLossy);

/// Number of maximal runs of non-whitespace code points, splitting on the
/// Unicode White_Space set. Malformed UTF-8 bytes count as non-space.
std::size_t count_words(std::string_view utf8);

}  // namespace navseg
