#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace navscore {

// One navigation utterance: the text as given plus its normalized word tokens.
struct Instruction {
  std::string raw;
  std::vector<std::string> tokens;

  // Tokens joined by single spaces.
  std::string normalized_text() const;

  friend bool operator==(const Instruction&, const Instruction&) = default;
};

// Lowercases (Unicode-aware), treats every non-alphanumeric code point as a
// separator, and splits. No stemming. Invalid UTF-8 bytes act as separators.
Instruction normalize(std::string_view raw);

// Token list only; same rules as normalize().
std::vector<std::string> tokenize(std::string_view raw);

namespace utf8 {

// Decodes UTF-8, substituting U+FFFD for each invalid byte.
std::u32string decode(std::string_view s);
std::string encode(std::u32string_view s);
std::string encode(char32_t cp);

}  // namespace utf8

}  // namespace navscore
