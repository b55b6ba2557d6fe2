#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "navscore/instruction.hpp"
#include "navscore/lexicon.hpp"

namespace navscore {

// Token list of one text with one unit-norm vector per token.
struct TokenEmbedding {
  std::vector<std::string> tokens;
  std::vector<std::vector<double>> vectors;
};

struct BackendInfo {
  std::string name;   // "lexical" or "remote"
  std::string model;  // model identifier reported by the backend
  std::size_t dim = 0;

  friend bool operator==(const BackendInfo&, const BackendInfo&) = default;
};

// Token-level embedding provider. Implementations must be deterministic and
// safe to call from several threads at once.
class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;

  // One TokenEmbedding per input text, in order. Throws BackendUnavailable.
  virtual std::vector<TokenEmbedding> embed(std::span<const std::string> texts) const = 0;

  virtual BackendInfo info() const = 0;
};

struct SimilarityResult {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  friend bool operator==(const SimilarityResult&, const SimilarityResult&) = default;
};

// Token string -> weight. Tokens absent from the map weigh 1.
using TokenWeights = std::unordered_map<std::string, double>;

// Cosine of two unit vectors clamped to [0, 1]. Bitwise-identical vectors
// score exactly 1. Throws ProtocolError on a dimension mismatch.
double clamped_cosine(std::span<const double> a, std::span<const double> b);

// Greedy matching over precomputed embeddings: recall averages, over reference
// tokens, the best cosine to any prediction token; precision is the mirror
// image. Both empty gives f1 = 1; exactly one empty gives 0.
SimilarityResult greedy_match(const TokenEmbedding& ref, const TokenEmbedding& pred,
                              const TokenWeights* weights = nullptr);

// Embeds both raw texts with `backend` and runs greedy_match.
SimilarityResult token_match_f1(const Instruction& ref, const Instruction& pred,
                                const EmbeddingBackend& backend,
                                const TokenWeights* weights = nullptr);

// Weight map giving boost_factor to every token that belongs to a lexicon
// phrase matched in either instruction.
TokenWeights directional_weights(const Instruction& ref, const Instruction& pred,
                                 const DirectionLexicon& lex, double boost_factor);

// token_match_f1 under directional_weights(); returns the f1.
double weighted_directional_similarity(const Instruction& ref, const Instruction& pred,
                                       const EmbeddingBackend& backend,
                                       const DirectionLexicon& lex, double boost_factor);

inline constexpr std::size_t kLexicalDim = 512;

// Hashes the padded character trigrams of a token ("#walk#" -> "#wa", "wal",
// "alk", "lk#") into a count vector of length kLexicalDim, L2-normalized.
// Trigrams are over code points; the bucket is FNV-1a-32 of the trigram's
// UTF-8 bytes modulo kLexicalDim.
std::vector<double> lexical_token_vector(const std::string& token);

// Offline backend: normalize() tokens embedded with lexical_token_vector().
std::shared_ptr<const EmbeddingBackend> lexical_backend();

}  // namespace navscore
