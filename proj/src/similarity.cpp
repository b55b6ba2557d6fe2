#include "navscore/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include <fmt/format.h>

#include "navscore/error.hpp"

namespace navscore {

namespace {

double weight_of(const TokenWeights* weights, const std::string& token) {
  if (weights == nullptr) return 1.0;
  const auto it = weights->find(token);
  return it == weights->end() ? 1.0 : it->second;
}

// Weighted mean over `from` tokens of the best cosine against any `to` token.
double directed_score(const TokenEmbedding& from, const TokenEmbedding& to,
                      const TokenWeights* weights) {
  double total = 0.0;
  double mass = 0.0;
  for (std::size_t i = 0; i < from.tokens.size(); ++i) {
    double best = 0.0;
    for (const auto& v : to.vectors) {
      best = std::max(best, clamped_cosine(from.vectors[i], v));
    }
    const double wt = weight_of(weights, from.tokens[i]);
    total += wt * best;
    mass += wt;
  }
  if (mass <= 0.0) return 0.0;
  return std::clamp(total / mass, 0.0, 1.0);
}

void check_aligned(const TokenEmbedding& e) {
  if (e.tokens.size() != e.vectors.size()) {
    throw ProtocolError(fmt::format("embedding has {} tokens but {} vectors", e.tokens.size(),
                                    e.vectors.size()));
  }
}

class LexicalBackend final : public EmbeddingBackend {
 public:
  std::vector<TokenEmbedding> embed(std::span<const std::string> texts) const override {
    std::vector<TokenEmbedding> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
      TokenEmbedding e;
      e.tokens = tokenize(text);
      e.vectors.reserve(e.tokens.size());
      for (const auto& t : e.tokens) e.vectors.push_back(lexical_token_vector(t));
      out.push_back(std::move(e));
    }
    return out;
  }

  BackendInfo info() const override {
    return {"lexical", "char-trigram-fnv1a-512", kLexicalDim};
  }
};

}  // namespace

double clamped_cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ProtocolError(fmt::format("vector dimension mismatch: {} vs {}", a.size(), b.size()));
  }
  if (std::equal(a.begin(), a.end(), b.begin())) return 1.0;
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return std::clamp(dot, 0.0, 1.0);
}

SimilarityResult greedy_match(const TokenEmbedding& ref, const TokenEmbedding& pred,
                              const TokenWeights* weights) {
  check_aligned(ref);
  check_aligned(pred);
  if (ref.tokens.empty() && pred.tokens.empty()) return {1.0, 1.0, 1.0};
  if (ref.tokens.empty() || pred.tokens.empty()) return {0.0, 0.0, 0.0};

  SimilarityResult r;
  r.recall = directed_score(ref, pred, weights);
  r.precision = directed_score(pred, ref, weights);
  const double denom = r.precision + r.recall;
  r.f1 = denom > 0.0 ? std::clamp(2.0 * r.precision * r.recall / denom, 0.0, 1.0) : 0.0;
  return r;
}

SimilarityResult token_match_f1(const Instruction& ref, const Instruction& pred,
                                const EmbeddingBackend& backend, const TokenWeights* weights) {
  const std::string texts[] = {ref.raw, pred.raw};
  const auto embedded = backend.embed(texts);
  if (embedded.size() != 2) {
    throw ProtocolError(fmt::format("backend returned {} items for 2 texts", embedded.size()));
  }
  return greedy_match(embedded[0], embedded[1], weights);
}

TokenWeights directional_weights(const Instruction& ref, const Instruction& pred,
                                 const DirectionLexicon& lex, double boost_factor) {
  TokenWeights weights;
  for (const Instruction* instr : {&ref, &pred}) {
    for (const auto& action : extract_actions(*instr, lex).actions) {
      for (std::size_t i = action.phrase_begin; i <= action.token_index; ++i) {
        weights[instr->tokens[i]] = boost_factor;
      }
    }
  }
  return weights;
}

double weighted_directional_similarity(const Instruction& ref, const Instruction& pred,
                                       const EmbeddingBackend& backend,
                                       const DirectionLexicon& lex, double boost_factor) {
  const auto weights = directional_weights(ref, pred, lex, boost_factor);
  return token_match_f1(ref, pred, backend, &weights).f1;
}

std::vector<double> lexical_token_vector(const std::string& token) {
  std::u32string padded = U"#";
  padded += utf8::decode(token);
  padded += U"#";

  std::vector<double> v(kLexicalDim, 0.0);
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
    std::uint32_t h = 2166136261u;
    for (const char c : utf8::encode(std::u32string_view(padded).substr(i, 3))) {
      h ^= static_cast<unsigned char>(c);
      h *= 16777619u;
    }
    v[h % kLexicalDim] += 1.0;
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

std::shared_ptr<const EmbeddingBackend> lexical_backend() {
  static const auto backend = std::make_shared<const LexicalBackend>();
  return backend;
}

}  // namespace navscore
