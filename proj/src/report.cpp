#include "navscore/report.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "navscore/error.hpp"

namespace navscore {

using nlohmann::json;

namespace {

json to_json(const DirectionalAction& a) {
  return {{"direction", std::string(to_string(a.direction))},
          {"token_index", a.token_index},
          {"phrase_begin", a.phrase_begin},
          {"surface", a.surface}};
}

DirectionalAction action_from_json(const json& j) {
  const auto label = j.at("direction").get<std::string>();
  const auto dir = parse_direction(label);
  if (!dir) throw SchemaError(fmt::format("unknown direction '{}' in report", label));
  return {*dir, j.at("token_index").get<std::size_t>(), j.at("phrase_begin").get<std::size_t>(),
          j.at("surface").get<std::string>()};
}

json to_json(const Statistic& s) {
  return {{"mean", s.mean}, {"median", s.median}, {"min", s.min}, {"max", s.max}};
}

json to_json(const std::optional<Statistic>& s) { return s ? to_json(*s) : json(nullptr); }

std::optional<Statistic> statistic_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  return Statistic{j.at("mean").get<double>(), j.at("median").get<double>(),
                   j.at("min").get<double>(), j.at("max").get<double>()};
}

// Shortest representation that round-trips.
std::string num(double v) { return fmt::format("{}", v); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

json to_json(const MetricConfig& cfg) {
  return {{"alpha", cfg.alpha},
          {"beta", cfg.beta},
          {"gamma", cfg.gamma},
          {"w", cfg.w},
          {"order_threshold", cfg.order_threshold},
          {"step_penalty_rate", cfg.step_penalty_rate},
          {"boost_factor", cfg.boost_factor},
          {"special_case_boost", cfg.special_case_boost},
          {"conflict_policy", cfg.conflict_policy.to_string()}};
}

MetricConfig metric_config_from_json(const json& j) {
  MetricConfig cfg;
  cfg.alpha = j.at("alpha").get<double>();
  cfg.beta = j.at("beta").get<double>();
  cfg.gamma = j.at("gamma").get<double>();
  cfg.w = j.at("w").get<double>();
  cfg.order_threshold = j.at("order_threshold").get<double>();
  cfg.step_penalty_rate = j.at("step_penalty_rate").get<double>();
  cfg.boost_factor = j.at("boost_factor").get<double>();
  cfg.special_case_boost = j.at("special_case_boost").get<double>();
  cfg.conflict_policy = ConflictPolicy::parse(j.at("conflict_policy").get<std::string>());
  return cfg;
}

json to_json(const ScoreBreakdown& b, bool include_config) {
  json witnesses = json::array();
  for (const auto& w : b.conflict.witnesses) {
    witnesses.push_back({{"reference", to_json(w.reference)}, {"prediction", to_json(w.prediction)}});
  }
  json j = {
      {"bert_f1", b.bert_f1},
      {"similarity", b.similarity},
      {"flow_bonus", b.flow_bonus},
      {"semantic_similarity", b.semantic_similarity},
      {"special_boost", b.special_boost},
      {"conflict", {{"conflict", b.conflict.conflict}, {"witnesses", witnesses}}},
      {"flow",
       {{"ref_steps", b.flow.ref_steps},
        {"pred_steps", b.flow.pred_steps},
        {"step_delta", b.flow.step_delta},
        {"order_similarity", b.flow.order_similarity},
        {"critical_mismatch", b.flow.critical_mismatch},
        {"flow_bonus", b.flow.flow_bonus}}},
      {"enhanced_score", b.enhanced_score},
      {"final_score", b.final_score},
  };
  if (include_config) j["config"] = to_json(b.config_snapshot);
  return j;
}

ScoreBreakdown breakdown_from_json(const json& j, const MetricConfig& fallback) {
  ScoreBreakdown b;
  b.bert_f1 = j.at("bert_f1").get<double>();
  b.similarity = j.at("similarity").get<double>();
  b.flow_bonus = j.at("flow_bonus").get<double>();
  b.semantic_similarity = j.at("semantic_similarity").get<double>();
  b.special_boost = j.at("special_boost").get<double>();
  const auto& c = j.at("conflict");
  b.conflict.conflict = c.at("conflict").get<bool>();
  for (const auto& w : c.at("witnesses")) {
    b.conflict.witnesses.push_back(
        {action_from_json(w.at("reference")), action_from_json(w.at("prediction"))});
  }
  const auto& f = j.at("flow");
  b.flow.ref_steps = f.at("ref_steps").get<std::size_t>();
  b.flow.pred_steps = f.at("pred_steps").get<std::size_t>();
  b.flow.step_delta = f.at("step_delta").get<std::size_t>();
  b.flow.order_similarity = f.at("order_similarity").get<double>();
  b.flow.critical_mismatch = f.at("critical_mismatch").get<bool>();
  b.flow.flow_bonus = f.at("flow_bonus").get<double>();
  b.enhanced_score = j.at("enhanced_score").get<double>();
  b.final_score = j.at("final_score").get<double>();
  b.config_snapshot = j.contains("config") ? metric_config_from_json(j["config"]) : fallback;
  return b;
}

json to_json(const EvaluationReport& report) {
  json records = json::array();
  for (const auto& r : report.per_record) {
    json entry = to_json(r.breakdown, false);
    entry["id"] = r.id;
    entry["reference"] = r.reference;
    entry["prediction"] = r.prediction;
    records.push_back(std::move(entry));
  }
  const auto& c = report.counts;
  const auto& m = report.metadata;
  return {
      {"metadata",
       {{"config", to_json(m.config)},
        {"backend", {{"name", m.backend.name}, {"model", m.backend.model}, {"dim", m.backend.dim}}},
        {"timestamp", m.timestamp ? json(*m.timestamp) : json(nullptr)}}},
      {"counts",
       {{"records", c.records},
        {"conflicts", c.conflicts},
        {"critical_mismatches", c.critical_mismatches},
        {"empty_action_pairs", c.empty_action_pairs},
        {"missing_predictions", c.missing_predictions},
        {"unknown_predictions", c.unknown_predictions}}},
      {"aggregates",
       {{"bert_f1", to_json(report.aggregates.bert_f1)},
        {"enhanced_score", to_json(report.aggregates.enhanced_score)},
        {"final_score", to_json(report.aggregates.final_score)}}},
      {"missing_ids", report.missing_ids},
      {"unknown_ids", report.unknown_ids},
      {"per_record", records},
  };
}

EvaluationReport report_from_json(const json& j) {
  EvaluationReport report;
  try {
    const auto& m = j.at("metadata");
    report.metadata.config = metric_config_from_json(m.at("config"));
    const auto& be = m.at("backend");
    report.metadata.backend = {be.at("name").get<std::string>(), be.at("model").get<std::string>(),
                               be.at("dim").get<std::size_t>()};
    if (!m.at("timestamp").is_null()) report.metadata.timestamp = m["timestamp"].get<std::string>();

    const auto& c = j.at("counts");
    report.counts = {c.at("records").get<std::size_t>(),
                     c.at("conflicts").get<std::size_t>(),
                     c.at("critical_mismatches").get<std::size_t>(),
                     c.at("empty_action_pairs").get<std::size_t>(),
                     c.at("missing_predictions").get<std::size_t>(),
                     c.at("unknown_predictions").get<std::size_t>()};

    const auto& a = j.at("aggregates");
    report.aggregates = {statistic_from_json(a.at("bert_f1")),
                         statistic_from_json(a.at("enhanced_score")),
                         statistic_from_json(a.at("final_score"))};
    report.missing_ids = j.at("missing_ids").get<std::vector<std::string>>();
    report.unknown_ids = j.at("unknown_ids").get<std::vector<std::string>>();

    for (const auto& r : j.at("per_record")) {
      report.per_record.push_back({r.at("id").get<std::string>(),
                                   r.at("reference").get<std::string>(),
                                   r.at("prediction").get<std::string>(),
                                   breakdown_from_json(r, report.metadata.config)});
    }
  } catch (const json::exception& e) {
    throw SchemaError(fmt::format("malformed report: {}", e.what()));
  }
  return report;
}

void write_csv(const EvaluationReport& report, std::ostream& out) {
  out << "id,bert_f1,similarity,flow_bonus,semantic_similarity,special_boost,conflict,"
         "critical_mismatch,enhanced_score,final_score\n";
  for (const auto& r : report.per_record) {
    const auto& b = r.breakdown;
    out << csv_field(r.id) << ',' << num(b.bert_f1) << ',' << num(b.similarity) << ','
        << num(b.flow_bonus) << ',' << num(b.semantic_similarity) << ',' << num(b.special_boost)
        << ',' << (b.conflict.conflict ? 1 : 0) << ',' << (b.flow.critical_mismatch ? 1 : 0)
        << ',' << num(b.enhanced_score) << ',' << num(b.final_score) << '\n';
  }
  const auto& a = report.aggregates;
  if (!a.final_score) return;
  const auto row = [&](const char* name, auto field) {
    out << "# " << name << ",bert_f1=" << num((*a.bert_f1).*field)
        << ",enhanced_score=" << num((*a.enhanced_score).*field)
        << ",final_score=" << num((*a.final_score).*field) << '\n';
  };
  row("mean", &Statistic::mean);
  row("median", &Statistic::median);
  row("min", &Statistic::min);
  row("max", &Statistic::max);
}

void emit_report(const EvaluationReport& report, ReportFormat format,
                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot write report to '{}'", path.string()));
  if (format == ReportFormat::Json) {
    out << to_json(report).dump(2) << '\n';
  } else {
    write_csv(report, out);
  }
  out.flush();
  if (!out) throw Error(fmt::format("failed writing report to '{}'", path.string()));
}

EvaluationReport read_report_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError(fmt::format("cannot open report '{}'", path.string()));
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw SchemaError(fmt::format("{}: malformed JSON: {}", path.string(), e.what()));
  }
  return report_from_json(j);
}

bool aggregates_consistent(const EvaluationReport& report) {
  if (compute_aggregates(report.per_record) != report.aggregates) return false;
  ReportCounts expected = report.counts;
  expected.records = report.per_record.size();
  expected.conflicts = expected.critical_mismatches = expected.empty_action_pairs = 0;
  for (const auto& r : report.per_record) {
    const auto& b = r.breakdown;
    if (b.conflict.conflict) ++expected.conflicts;
    if (b.flow.critical_mismatch) ++expected.critical_mismatches;
    if (b.flow.ref_steps == 0 && b.flow.pred_steps == 0) ++expected.empty_action_pairs;
  }
  return expected == report.counts && report.counts.missing_predictions == report.missing_ids.size() &&
         report.counts.unknown_predictions == report.unknown_ids.size();
}

}  // namespace navscore
