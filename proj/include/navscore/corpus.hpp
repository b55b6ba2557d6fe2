#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "navscore/scoring.hpp"

namespace navscore {

// One annotated sample: {"<id>": {"path": ..., "query": ..., "answer": ...}}.
// The image path is carried through as text and never opened.
struct CorpusRecord {
  std::string id;
  std::string path;
  std::string query;
  std::string answer;

  friend bool operator==(const CorpusRecord&, const CorpusRecord&) = default;
};

struct PredictionRecord {
  std::string id;
  std::string prediction;

  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

// Parses a JSON object of id -> {path, query, answer}. Records come back
// sorted by id (byte order). Throws SchemaError naming the id and line on
// malformed JSON, missing or non-string keys, empty query/answer, or a
// duplicate id.
std::vector<CorpusRecord> parse_corpus(std::string_view text, std::string_view source = "<corpus>");
std::vector<CorpusRecord> load_corpus(const std::filesystem::path& path);

// Accepts either a JSON object of id -> prediction string or JSON lines of
// {"id": ..., "prediction": ...}. JSON lines is chosen when the first
// non-blank line is on its own a complete object with "id" and "prediction"
// keys. Sorted by id; duplicates are errors.
std::vector<PredictionRecord> parse_predictions(std::string_view text,
                                                std::string_view source = "<predictions>");
std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path);

enum class Strictness { Strict, SkipMissing };

struct RecordScore {
  std::string id;
  std::string reference;
  std::string prediction;
  ScoreBreakdown breakdown;
};

struct Statistic {
  double mean = 0.0;
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;

  friend bool operator==(const Statistic&, const Statistic&) = default;
};

// Absent (nullopt) when there are no scored records.
struct Aggregates {
  std::optional<Statistic> bert_f1;
  std::optional<Statistic> enhanced_score;
  std::optional<Statistic> final_score;

  friend bool operator==(const Aggregates&, const Aggregates&) = default;
};

struct ReportCounts {
  std::size_t records = 0;
  std::size_t conflicts = 0;
  std::size_t critical_mismatches = 0;
  std::size_t empty_action_pairs = 0;
  std::size_t missing_predictions = 0;  // corpus ids without a prediction
  std::size_t unknown_predictions = 0;  // prediction ids not in the corpus

  friend bool operator==(const ReportCounts&, const ReportCounts&) = default;
};

struct ReportMetadata {
  MetricConfig config;
  BackendInfo backend;
  std::optional<std::string> timestamp;  // ISO-8601 UTC
};

struct EvaluationReport {
  std::vector<RecordScore> per_record;  // sorted by id
  Aggregates aggregates;
  ReportCounts counts;
  std::vector<std::string> missing_ids;
  std::vector<std::string> unknown_ids;
  ReportMetadata metadata;
};

struct EvaluateOptions {
  Strictness strictness = Strictness::Strict;
  // Worker threads; 0 means std::thread::hardware_concurrency().
  unsigned jobs = 1;
  bool timestamp = true;
};

// Scores every prediction against its reference answer. In strict mode an id
// present on only one side throws MissingIdError listing the ids; otherwise
// such ids are counted and listed in the report. Results do not depend on
// input order or on `jobs`.
EvaluationReport evaluate_corpus(const std::vector<CorpusRecord>& corpus,
                                 const std::vector<PredictionRecord>& predictions,
                                 const ScoringContext& ctx, const EvaluateOptions& options = {});

// Mean, median, min, max of the three headline scores over `per_record`.
Aggregates compute_aggregates(const std::vector<RecordScore>& per_record);

// Distribution of a count-valued quantity.
struct CountDistribution {
  std::size_t min = 0;
  double median = 0.0;
  std::size_t max = 0;
  std::map<std::size_t, std::size_t> histogram;  // value -> occurrences
};

struct CorpusStats {
  std::size_t records = 0;
  CountDistribution query_words;
  CountDistribution answer_words;
  CountDistribution answer_actions;
  std::size_t queries_in_4_to_8_words = 0;
  std::size_t answers_in_5_to_12_words = 0;
};

CorpusStats corpus_stats(const std::vector<CorpusRecord>& corpus, const DirectionLexicon& lex);

}  // namespace navscore
