#include "navscore/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "navscore/error.hpp"

namespace navscore {

namespace {

std::string join(const DirectionLexicon::Phrase& p) {
  std::string out;
  for (const auto& t : p) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

DirectionLexicon make_builtin() {
  DirectionLexicon lex;
  const std::pair<const char*, Direction> table[] = {
      {"left", Direction::Left},
      {"turn left", Direction::Left},
      {"take a left", Direction::Left},
      {"right", Direction::Right},
      {"turn right", Direction::Right},
      {"take a right", Direction::Right},
      {"forward", Direction::Forward},
      {"straight", Direction::Forward},
      {"go straight", Direction::Forward},
      {"walk forward", Direction::Forward},
      {"ahead", Direction::Forward},
      {"go ahead", Direction::Forward},
      {"back", Direction::Backward},
      {"backward", Direction::Backward},
      {"go back", Direction::Backward},
      {"behind", Direction::Backward},
      {"up", Direction::Up},
      {"upstairs", Direction::Up},
      {"down", Direction::Down},
      {"downstairs", Direction::Down},
      {"stop", Direction::Stop},
      {"wait", Direction::Stop},
      {"turn around", Direction::TurnAround},
  };
  for (const auto& [phrase, d] : table) lex.add(phrase, d);
  return lex;
}

}  // namespace

void DirectionLexicon::add(std::string_view phrase, Direction d) {
  Phrase tokens = tokenize(phrase);
  if (tokens.empty()) {
    throw SchemaError(fmt::format("lexicon phrase '{}' has no word tokens", phrase));
  }
  const auto [it, inserted] = entries_.emplace(tokens, d);
  if (!inserted && it->second != d) {
    throw SchemaError(fmt::format("lexicon phrase '{}' mapped to both {} and {}",
                                  join(tokens), to_string(it->second), to_string(d)));
  }
  max_len_ = std::max(max_len_, tokens.size());
}

const DirectionLexicon& DirectionLexicon::builtin() {
  static const DirectionLexicon lex = make_builtin();
  return lex;
}

std::size_t DirectionLexicon::match_at(const std::vector<std::string>& tokens,
                                       std::size_t pos, Direction* out) const {
  if (pos >= tokens.size()) return 0;
  const std::size_t longest = std::min(max_len_, tokens.size() - pos);
  Phrase probe;
  for (std::size_t len = longest; len > 0; --len) {
    probe.assign(tokens.begin() + static_cast<std::ptrdiff_t>(pos),
                 tokens.begin() + static_cast<std::ptrdiff_t>(pos + len));
    if (const auto it = entries_.find(probe); it != entries_.end()) {
      if (out != nullptr) *out = it->second;
      return len;
    }
  }
  return 0;
}

std::vector<std::string> DirectionLexicon::equivalence_class(Direction d) const {
  std::vector<std::string> out;
  for (const auto& [phrase, dir] : entries_) {
    if (dir == d) out.push_back(join(phrase));
  }
  std::sort(out.begin(), out.end());
  return out;
}

DirectionLexicon parse_lexicon(std::istream& in, std::string_view source) {
  DirectionLexicon lex;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) {
      body = body.substr(0, hash);
    }
    if (trim(body).empty()) continue;
    const auto tab = body.find('\t');
    if (tab == std::string_view::npos) {
      throw SchemaError(fmt::format("{}:{}: expected 'phrase<TAB>DIRECTION'", source, lineno));
    }
    const auto phrase = trim(body.substr(0, tab));
    const auto label = trim(body.substr(tab + 1));
    const auto dir = parse_direction(label);
    if (!dir) {
      throw SchemaError(fmt::format("{}:{}: unknown direction '{}'", source, lineno, label));
    }
    try {
      lex.add(phrase, *dir);
    } catch (const SchemaError& e) {
      throw SchemaError(fmt::format("{}:{}: {}", source, lineno, e.what()));
    }
  }
  return lex;
}

DirectionLexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(fmt::format("cannot open lexicon file '{}'", path.string()));
  return parse_lexicon(in, path.string());
}

std::vector<Direction> ActionSequence::directions() const {
  std::vector<Direction> out;
  out.reserve(actions.size());
  for (const auto& a : actions) out.push_back(a.direction);
  return out;
}

ActionSequence extract_actions(const Instruction& instr, const DirectionLexicon& lex) {
  ActionSequence seq;
  seq.source = instr;
  const auto& tokens = instr.tokens;
  std::size_t pos = 0;
  while (pos < tokens.size()) {
    Direction d{};
    const std::size_t len = lex.match_at(tokens, pos, &d);
    if (len == 0) {
      ++pos;
      continue;
    }
    std::string surface = tokens[pos];
    for (std::size_t k = pos + 1; k < pos + len; ++k) {
      surface.push_back(' ');
      surface += tokens[k];
    }
    seq.actions.push_back(DirectionalAction{d, pos + len - 1, pos, std::move(surface)});
    pos += len;
  }
  return seq;
}

}  // namespace navscore
