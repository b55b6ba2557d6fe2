#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "navscore/direction.hpp"
#include "navscore/instruction.hpp"

namespace navscore {

// Phrase -> canonical Direction table. Phrases are stored normalized, so
// lookups are case- and punctuation-insensitive. Phrases sharing a Direction
// form one equivalence class.
class DirectionLexicon {
 public:
  using Phrase = std::vector<std::string>;

  DirectionLexicon() = default;

  // Throws SchemaError if the normalized phrase is empty or already bound to a
  // different Direction. Re-adding the same binding is a no-op.
  void add(std::string_view phrase, Direction d);

  // The default table shipped in data/lexicon.tsv.
  static const DirectionLexicon& builtin();

  // Longest phrase starting at tokens[pos]; returns the match length (0 if none).
  std::size_t match_at(const std::vector<std::string>& tokens, std::size_t pos,
                       Direction* out) const;

  // All phrases of the equivalence class of d, space-joined, sorted.
  std::vector<std::string> equivalence_class(Direction d) const;

  const std::map<Phrase, Direction>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  friend bool operator==(const DirectionLexicon& a, const DirectionLexicon& b) {
    return a.entries_ == b.entries_;
  }

 private:
  std::map<Phrase, Direction> entries_;
  std::size_t max_len_ = 0;
};

// `phrase<TAB>DIRECTION` lines; '#' starts a comment; blank lines ignored.
// `source` names the input in error messages.
DirectionLexicon parse_lexicon(std::istream& in, std::string_view source = "<lexicon>");
DirectionLexicon load_lexicon(const std::filesystem::path& path);

struct DirectionalAction {
  Direction direction;
  // Index of the trigger token: the last token of the matched phrase
  // ("turn left" triggers on "left").
  std::size_t token_index;
  // Index of the first token of the matched phrase.
  std::size_t phrase_begin;
  std::string surface;

  friend bool operator==(const DirectionalAction&, const DirectionalAction&) = default;
};

struct ActionSequence {
  std::vector<DirectionalAction> actions;
  Instruction source;

  std::vector<Direction> directions() const;
  std::size_t size() const noexcept { return actions.size(); }
  bool empty() const noexcept { return actions.empty(); }

  friend bool operator==(const ActionSequence&, const ActionSequence&) = default;
};

// Left-to-right scan with longest-match phrase lookup. Negation is not
// interpreted: "do not turn left" still yields LEFT.
ActionSequence extract_actions(const Instruction& instr, const DirectionLexicon& lex);

}  // namespace navscore
