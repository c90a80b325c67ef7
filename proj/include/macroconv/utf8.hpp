#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace macroconv::utf8 {

inline constexpr char32_t kReplacement = 0xFFFD;

/// Decodes one code point starting at `pos` and advances `pos`. Invalid sequences
/// decode to U+FFFD and consume a single byte.
char32_t next(std::string_view text, std::size_t& pos);

void append(std::string& out, char32_t code);

std::size_t length(std::string_view text);

}  // namespace macroconv::utf8
