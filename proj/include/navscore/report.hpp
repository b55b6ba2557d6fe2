#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "navscore/corpus.hpp"

namespace navscore {

enum class ReportFormat { Json, Csv };

nlohmann::json to_json(const ScoreBreakdown& b, bool include_config = true);
nlohmann::json to_json(const MetricConfig& cfg);
nlohmann::json to_json(const EvaluationReport& report);

MetricConfig metric_config_from_json(const nlohmann::json& j);
// Breakdowns without a "config" member take `fallback` as their snapshot.
ScoreBreakdown breakdown_from_json(const nlohmann::json& j, const MetricConfig& fallback = {});
EvaluationReport report_from_json(const nlohmann::json& j);

// Columns: id, bert_f1, similarity, flow_bonus, semantic_similarity,
// special_boost, conflict, critical_mismatch, enhanced_score, final_score.
// Aggregates follow as '#'-prefixed rows; an empty report is header-only.
void write_csv(const EvaluationReport& report, std::ostream& out);

// Throws Error if the path cannot be written.
void emit_report(const EvaluationReport& report, ReportFormat format,
                 const std::filesystem::path& path);

EvaluationReport read_report_json(const std::filesystem::path& path);

// True when every stored aggregate equals (exactly) the statistic recomputed
// from per_record, and the counts agree with the breakdowns.
bool aggregates_consistent(const EvaluationReport& report);

}  // namespace navscore
