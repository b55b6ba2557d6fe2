#pragma once

#include "navscore/config.hpp"
#include "navscore/directional.hpp"
#include "navscore/instruction.hpp"
#include "navscore/lexicon.hpp"
#include "navscore/similarity.hpp"

namespace navscore {

// Every intermediate term of one reference/prediction comparison.
struct ScoreBreakdown {
  double similarity = 0.0;           // direction-weighted token F1
  double flow_bonus = 0.0;
  double semantic_similarity = 0.0;  // unweighted token F1
  double special_boost = 0.0;
  ConflictReport conflict;
  FlowAnalysis flow;
  double enhanced_score = 0.0;
  double bert_f1 = 0.0;
  double final_score = 0.0;
  MetricConfig config_snapshot;
};

// The shared read-only inputs of a scoring run.
struct ScoringContext {
  const EmbeddingBackend& backend;
  const DirectionLexicon& lexicon;
  const ConflictPairSet& pairs;
  const MetricConfig& config;
};

// cfg.special_case_boost when both direction lists are equal and nonempty but
// the raw texts differ ("go straight" vs "walk forward"); 0 otherwise.
double special_case(const ActionSequence& ref_seq, const ActionSequence& pred_seq,
                    const Instruction& ref, const Instruction& pred, const MetricConfig& cfg);

// alpha*similarity + beta*flow_bonus + gamma*semantic_similarity + special_boost,
// clamped to [0, 1]; then zeroed on a critical sequence mismatch, and zeroed
// or scaled by (1 - factor) on a directional conflict per cfg.conflict_policy.
// Fills every field except bert_f1 and final_score.
ScoreBreakdown enhanced_score(const Instruction& ref, const Instruction& pred,
                              const ScoringContext& ctx);

// enhanced_score() plus bert_f1 and final = (1 - w) * bert_f1 + w * enhanced.
// The interpolation is exact at w = 0 and w = 1.
ScoreBreakdown final_score(const Instruction& ref, const Instruction& pred,
                           const ScoringContext& ctx);

}  // namespace navscore
