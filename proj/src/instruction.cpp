#include "navscore/instruction.hpp"

#include <locale>

namespace navscore {

namespace utf8 {

std::u32string decode(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    }
    bool ok = len > 0 && i + len <= s.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
      } else {
        cp = (cp << 6) | (b & 0x3F);
      }
    }
    // Reject overlong forms, surrogates and out-of-range values.
    if (ok) {
      static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
      if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) ok = false;
    }
    if (!ok) {
      out.push_back(U'�');
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string encode(char32_t cp) {
  std::string out;
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
  return out;
}

std::string encode(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t cp : s) out += encode(cp);
  return out;
}

}  // namespace utf8

namespace {

// Classification goes through wchar_t (32-bit on the supported platforms).
// Falls back to ASCII rules when no UTF-8 locale is installed.
class CharClass {
 public:
  CharClass() {
    for (const char* name : {"C.UTF-8", "C.utf8", "en_US.UTF-8"}) {
      try {
        locale_ = std::locale(name);
        unicode_ = true;
        return;
      } catch (const std::runtime_error&) {
      }
    }
  }

  bool is_word(char32_t cp) const {
    if (cp < 0x80) return std::isalnum(static_cast<char>(cp), std::locale::classic());
    if (!unicode_ || cp == U'�') return false;
    return std::isalnum(static_cast<wchar_t>(cp), locale_);
  }

  char32_t lower(char32_t cp) const {
    if (cp < 0x80) {
      return (cp >= 'A' && cp <= 'Z') ? cp + ('a' - 'A') : cp;
    }
    if (!unicode_) return cp;
    return static_cast<char32_t>(std::tolower(static_cast<wchar_t>(cp), locale_));
  }

 private:
  std::locale locale_;
  bool unicode_ = false;
};

const CharClass& char_class() {
  static const CharClass instance;
  return instance;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view raw) {
  const CharClass& cc = char_class();
  std::vector<std::string> tokens;
  std::u32string current;
  for (char32_t cp : utf8::decode(raw)) {
    if (cc.is_word(cp)) {
      current.push_back(cc.lower(cp));
    } else if (!current.empty()) {
      tokens.push_back(utf8::encode(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(utf8::encode(current));
  return tokens;
}

Instruction normalize(std::string_view raw) {
  return Instruction{std::string(raw), tokenize(raw)};
}

std::string Instruction::normalized_text() const {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

}  // namespace navscore
