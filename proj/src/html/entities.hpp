#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

namespace navseg::html {

inline constexpr std::size_t kMaxEntityNameLength = 32;

struct EntityMatch {
  std::string_view name;   // includes the trailing ';' when the name has one
  std::string_view value;  // UTF-8
};

/// Longest named character reference that prefixes `input` (which starts just
/// after the '&').
std::optional<EntityMatch> match_named_entity(std::string_view input);

}  // namespace navseg::html
