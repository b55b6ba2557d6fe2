#include "navscore/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "navscore/error.hpp"

namespace navscore {

double special_case(const ActionSequence& ref_seq, const ActionSequence& pred_seq,
                    const Instruction& ref, const Instruction& pred, const MetricConfig& cfg) {
  if (ref_seq.empty() || ref.raw == pred.raw) return 0.0;
  return ref_seq.directions() == pred_seq.directions() ? cfg.special_case_boost : 0.0;
}

namespace {

// Embeds both texts once and derives the weighted and unweighted F1 from the
// same vectors.
struct TokenScores {
  SimilarityResult plain;
  SimilarityResult weighted;
};

TokenScores token_scores(const Instruction& ref, const Instruction& pred,
                         const ScoringContext& ctx) {
  const std::string texts[] = {ref.raw, pred.raw};
  const auto embedded = ctx.backend.embed(texts);
  if (embedded.size() != 2) {
    throw ProtocolError("backend returned a misaligned batch");
  }
  const auto weights = directional_weights(ref, pred, ctx.lexicon, ctx.config.boost_factor);
  return {greedy_match(embedded[0], embedded[1]),
          greedy_match(embedded[0], embedded[1], &weights)};
}

ScoreBreakdown assemble(const Instruction& ref, const Instruction& pred,
                        const ScoringContext& ctx, const TokenScores& scores) {
  const MetricConfig& cfg = ctx.config;
  const auto ref_seq = extract_actions(ref, ctx.lexicon);
  const auto pred_seq = extract_actions(pred, ctx.lexicon);

  ScoreBreakdown b;
  b.config_snapshot = cfg;
  b.similarity = scores.weighted.f1;
  b.semantic_similarity = scores.plain.f1;
  b.bert_f1 = scores.plain.f1;
  b.flow = analyze_flow(ref_seq, pred_seq, cfg);
  b.flow_bonus = b.flow.flow_bonus;
  b.conflict = detect_conflict(ref_seq, pred_seq, ctx.pairs);
  b.special_boost = special_case(ref_seq, pred_seq, ref, pred, cfg);

  double score = cfg.alpha * b.similarity + cfg.beta * b.flow_bonus +
                 cfg.gamma * b.semantic_similarity + b.special_boost;
  score = std::clamp(score, 0.0, 1.0);
  if (b.flow.critical_mismatch) score = 0.0;
  if (b.conflict.conflict) {
    score = cfg.conflict_policy.kind == ConflictPolicy::Kind::Zero
                ? 0.0
                : score * (1.0 - cfg.conflict_policy.factor);
  }
  b.enhanced_score = score;
  return b;
}

}  // namespace

ScoreBreakdown enhanced_score(const Instruction& ref, const Instruction& pred,
                              const ScoringContext& ctx) {
  auto b = assemble(ref, pred, ctx, token_scores(ref, pred, ctx));
  b.bert_f1 = 0.0;
  return b;
}

ScoreBreakdown final_score(const Instruction& ref, const Instruction& pred,
                           const ScoringContext& ctx) {
  auto b = assemble(ref, pred, ctx, token_scores(ref, pred, ctx));
  b.final_score = std::clamp(std::lerp(b.bert_f1, b.enhanced_score, ctx.config.w), 0.0, 1.0);
  return b;
}

}  // namespace navscore
