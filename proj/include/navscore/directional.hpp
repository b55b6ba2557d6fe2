#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <string_view>
#include <utility>
#include <vector>

#include "navscore/config.hpp"
#include "navscore/direction.hpp"
#include "navscore/lexicon.hpp"

namespace navscore {

// Unordered pairs of opposing directions. Always symmetric and irreflexive:
// add() inserts both orientations and rejects self-pairs.
class ConflictPairSet {
 public:
  ConflictPairSet() = default;

  void add(Direction a, Direction b);
  bool opposes(Direction a, Direction b) const noexcept;

  // LEFT/RIGHT, FORWARD/BACKWARD, UP/DOWN.
  static const ConflictPairSet& builtin();

  // Ordered pairs, both orientations.
  const std::set<std::pair<Direction, Direction>>& ordered_pairs() const noexcept {
    return pairs_;
  }

  friend bool operator==(const ConflictPairSet&, const ConflictPairSet&) = default;

 private:
  std::set<std::pair<Direction, Direction>> pairs_;
};

// `DIRECTION<TAB>DIRECTION` lines, '#' comments. Symmetry is added by closure.
ConflictPairSet parse_conflict_pairs(std::istream& in, std::string_view source = "<pairs>");
ConflictPairSet load_conflict_pairs(const std::filesystem::path& path);

struct ConflictWitness {
  DirectionalAction reference;
  DirectionalAction prediction;

  friend bool operator==(const ConflictWitness&, const ConflictWitness&) = default;
};

struct ConflictReport {
  bool conflict = false;
  std::vector<ConflictWitness> witnesses;

  friend bool operator==(const ConflictReport&, const ConflictReport&) = default;
};

// Positional first: the i-th reference action against the i-th prediction
// action. Only if no aligned position opposes, directions that have no
// same-direction counterpart anywhere on the other side are compared against
// each other.
ConflictReport detect_conflict(const ActionSequence& ref, const ActionSequence& pred,
                               const ConflictPairSet& pairs);

// Length of the longest common subsequence of two direction lists.
std::size_t lcs_length(const std::vector<Direction>& a, const std::vector<Direction>& b);

// LCS / max length; 1 when both are empty, 0 when exactly one is.
double order_similarity(const ActionSequence& ref, const ActionSequence& pred);
double order_similarity(const std::vector<Direction>& ref, const std::vector<Direction>& pred);

struct FlowAnalysis {
  std::size_t ref_steps = 0;
  std::size_t pred_steps = 0;
  std::size_t step_delta = 0;
  double order_similarity = 0.0;
  bool critical_mismatch = false;
  double flow_bonus = 0.0;

  friend bool operator==(const FlowAnalysis&, const FlowAnalysis&) = default;
};

// The non-critical flow bonus:
//   order_similarity * max(0, 1 - step_penalty_rate * step_delta / max(ref_steps, 1))
double flow_bonus_for(double order_similarity, std::size_t ref_steps, std::size_t step_delta,
                      const MetricConfig& cfg);

// Both sequences nonempty with order_similarity below cfg.order_threshold is a
// critical mismatch and forces flow_bonus to 0. Two empty sequences get 1.
FlowAnalysis analyze_flow(const ActionSequence& ref, const ActionSequence& pred,
                          const MetricConfig& cfg);

}  // namespace navscore
