#include "navscore/corpus.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "navscore/error.hpp"

namespace navscore {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path, std::string_view what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError(fmt::format("cannot open {} file '{}'", what, path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_at(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + offset, '\n'));
}

// Line of the nth (0-based) occurrence of `key` used as an object key.
// Falls back to 0 (unknown) when not found.
std::size_t key_line(std::string_view text, const std::string& key, std::size_t nth = 0) {
  const std::string needle = json(key).dump();
  std::size_t pos = 0;
  std::size_t seen = 0;
  while ((pos = text.find(needle, pos)) != std::string_view::npos) {
    auto after = text.find_first_not_of(" \t\r\n", pos + needle.size());
    if (after != std::string_view::npos && text[after] == ':') {
      if (seen++ == nth) return line_at(text, pos);
    }
    pos += needle.size();
  }
  return 0;
}

std::string where(std::string_view source, std::size_t line) {
  return line == 0 ? std::string(source) : fmt::format("{}:{}", source, line);
}

// Top-level object parse that rejects duplicate keys at depth 1.
json parse_top_object(std::string_view text, std::string_view source, std::string_view what) {
  std::unordered_map<std::string, std::size_t> seen;
  json::parser_callback_t cb = [&](int depth, json::parse_event_t event, json& parsed) {
    if (event == json::parse_event_t::key && depth == 1) {
      const auto key = parsed.get<std::string>();
      if (const auto n = seen[key]++; n > 0) {
        throw SchemaError(fmt::format("{}: duplicate {} id '{}'",
                                      where(source, key_line(text, key, n)), what, key));
      }
    }
    return true;
  };
  json doc;
  try {
    doc = json::parse(text.begin(), text.end(), cb);
  } catch (const json::parse_error& e) {
    throw SchemaError(fmt::format("{}: malformed JSON: {}",
                                  where(source, line_at(text, e.byte > 0 ? e.byte - 1 : 0)),
                                  e.what()));
  }
  if (!doc.is_object()) {
    throw SchemaError(fmt::format("{}: expected a JSON object of id -> {}", source, what));
  }
  return doc;
}

std::string required_string(const json& obj, const char* key, std::string_view text,
                            std::string_view source, const std::string& id) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw SchemaError(fmt::format("{}: record '{}' is missing required key \"{}\"",
                                  where(source, key_line(text, id)), id, key));
  }
  if (!it->is_string()) {
    throw SchemaError(fmt::format("{}: record '{}' key \"{}\" must be a string",
                                  where(source, key_line(text, id)), id, key));
  }
  return it->get<std::string>();
}

std::string_view first_nonblank_line(std::string_view text) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(pos, end - pos);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) return line;
    pos = end + 1;
  }
  return {};
}

bool looks_like_jsonl(std::string_view text) {
  const auto line = first_nonblank_line(text);
  if (line.empty()) return false;
  try {
    const auto row = json::parse(line);
    return row.is_object() && row.contains("id") && row.contains("prediction");
  } catch (const json::exception&) {
    return false;
  }
}

std::vector<PredictionRecord> parse_jsonl(std::string_view text, std::string_view source) {
  std::vector<PredictionRecord> out;
  std::unordered_set<std::string> ids;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(pos, end - pos);
    ++lineno;
    pos = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    json row;
    try {
      row = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(fmt::format("{}:{}: malformed JSON line: {}", source, lineno, e.what()));
    }
    if (!row.is_object() || !row.contains("id") || !row.contains("prediction") ||
        !row["id"].is_string() || !row["prediction"].is_string()) {
      throw SchemaError(fmt::format(
          "{}:{}: expected {{\"id\": string, \"prediction\": string}}", source, lineno));
    }
    PredictionRecord rec{row["id"].get<std::string>(), row["prediction"].get<std::string>()};
    if (!ids.insert(rec.id).second) {
      throw SchemaError(fmt::format("{}:{}: duplicate prediction id '{}'", source, lineno, rec.id));
    }
    out.push_back(std::move(rec));
  }
  return out;
}

Statistic summarize(std::vector<double> values) {
  Statistic s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  std::sort(values.begin(), values.end());
  s.min = values.front();
  s.max = values.back();
  const std::size_t n = values.size();
  s.median = n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
  return s;
}

CountDistribution distribution(std::vector<std::size_t> values) {
  CountDistribution d;
  if (values.empty()) return d;
  std::sort(values.begin(), values.end());
  d.min = values.front();
  d.max = values.back();
  const std::size_t n = values.size();
  d.median = n % 2 == 1 ? static_cast<double>(values[n / 2])
                        : (static_cast<double>(values[n / 2 - 1]) +
                           static_cast<double>(values[n / 2])) / 2.0;
  for (auto v : values) ++d.histogram[v];
  return d;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::vector<CorpusRecord> parse_corpus(std::string_view text, std::string_view source) {
  const json doc = parse_top_object(text, source, "corpus");
  std::vector<CorpusRecord> out;
  out.reserve(doc.size());
  for (const auto& [id, value] : doc.items()) {
    if (!value.is_object()) {
      throw SchemaError(fmt::format("{}: record '{}' must be an object",
                                    where(source, key_line(text, id)), id));
    }
    CorpusRecord rec;
    rec.id = id;
    rec.path = required_string(value, "path", text, source, id);
    rec.query = required_string(value, "query", text, source, id);
    rec.answer = required_string(value, "answer", text, source, id);
    for (const auto* field : {&rec.query, &rec.answer}) {
      if (tokenize(*field).empty()) {
        throw SchemaError(fmt::format("{}: record '{}' has an empty {}",
                                      where(source, key_line(text, id)), id,
                                      field == &rec.query ? "query" : "answer"));
      }
    }
    out.push_back(std::move(rec));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

std::vector<CorpusRecord> load_corpus(const std::filesystem::path& path) {
  return parse_corpus(read_file(path, "corpus"), path.string());
}

std::vector<PredictionRecord> parse_predictions(std::string_view text, std::string_view source) {
  std::vector<PredictionRecord> out;
  if (looks_like_jsonl(text)) {
    out = parse_jsonl(text, source);
  } else {
    const json doc = parse_top_object(text, source, "prediction");
    for (const auto& [id, value] : doc.items()) {
      if (!value.is_string()) {
        throw SchemaError(fmt::format("{}: prediction '{}' must be a string",
                                      where(source, key_line(text, id)), id));
      }
      out.push_back({id, value.get<std::string>()});
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path) {
  return parse_predictions(read_file(path, "predictions"), path.string());
}

Aggregates compute_aggregates(const std::vector<RecordScore>& per_record) {
  Aggregates agg;
  if (per_record.empty()) return agg;
  std::vector<double> bert, enhanced, final_scores;
  for (const auto& r : per_record) {
    bert.push_back(r.breakdown.bert_f1);
    enhanced.push_back(r.breakdown.enhanced_score);
    final_scores.push_back(r.breakdown.final_score);
  }
  agg.bert_f1 = summarize(std::move(bert));
  agg.enhanced_score = summarize(std::move(enhanced));
  agg.final_score = summarize(std::move(final_scores));
  return agg;
}

EvaluationReport evaluate_corpus(const std::vector<CorpusRecord>& corpus,
                                 const std::vector<PredictionRecord>& predictions,
                                 const ScoringContext& ctx, const EvaluateOptions& options) {
  std::map<std::string, const CorpusRecord*> refs;
  for (const auto& r : corpus) {
    if (!refs.emplace(r.id, &r).second) {
      throw SchemaError(fmt::format("duplicate corpus id '{}'", r.id));
    }
  }
  std::map<std::string, const PredictionRecord*> preds;
  for (const auto& p : predictions) {
    if (!preds.emplace(p.id, &p).second) {
      throw SchemaError(fmt::format("duplicate prediction id '{}'", p.id));
    }
  }

  EvaluationReport report;
  for (const auto& [id, rec] : refs) {
    if (!preds.contains(id)) report.missing_ids.push_back(id);
  }
  for (const auto& [id, rec] : preds) {
    if (!refs.contains(id)) report.unknown_ids.push_back(id);
  }
  if (options.strictness == Strictness::Strict &&
      (!report.missing_ids.empty() || !report.unknown_ids.empty())) {
    std::string msg;
    if (!report.missing_ids.empty()) {
      msg += fmt::format("no prediction for id(s): {}", fmt::join(report.missing_ids, ", "));
    }
    if (!report.unknown_ids.empty()) {
      if (!msg.empty()) msg += "; ";
      msg += fmt::format("prediction id(s) not in corpus: {}", fmt::join(report.unknown_ids, ", "));
    }
    throw MissingIdError(msg);
  }

  for (const auto& [id, pred] : preds) {
    if (const auto it = refs.find(id); it != refs.end()) {
      report.per_record.push_back({id, it->second->answer, pred->prediction, {}});
    }
  }

  unsigned jobs = options.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                    : options.jobs;
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(1, report.per_record.size())));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < report.per_record.size(); i = next++) {
      try {
        auto& r = report.per_record[i];
        r.breakdown = final_score(normalize(r.reference), normalize(r.prediction), ctx);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = report.per_record.size();
      }
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  auto& counts = report.counts;
  counts.records = report.per_record.size();
  counts.missing_predictions = report.missing_ids.size();
  counts.unknown_predictions = report.unknown_ids.size();
  for (const auto& r : report.per_record) {
    const auto& b = r.breakdown;
    if (b.conflict.conflict) ++counts.conflicts;
    if (b.flow.critical_mismatch) ++counts.critical_mismatches;
    if (b.flow.ref_steps == 0 && b.flow.pred_steps == 0) ++counts.empty_action_pairs;
  }
  report.aggregates = compute_aggregates(report.per_record);
  report.metadata.config = ctx.config;
  report.metadata.backend = ctx.backend.info();
  if (options.timestamp) report.metadata.timestamp = utc_timestamp();
  return report;
}

CorpusStats corpus_stats(const std::vector<CorpusRecord>& corpus, const DirectionLexicon& lex) {
  CorpusStats stats;
  stats.records = corpus.size();
  std::vector<std::size_t> query_words, answer_words, answer_actions;
  for (const auto& rec : corpus) {
    const auto q = normalize(rec.query);
    const auto a = normalize(rec.answer);
    query_words.push_back(q.tokens.size());
    answer_words.push_back(a.tokens.size());
    answer_actions.push_back(extract_actions(a, lex).size());
    if (q.tokens.size() >= 4 && q.tokens.size() <= 8) ++stats.queries_in_4_to_8_words;
    if (a.tokens.size() >= 5 && a.tokens.size() <= 12) ++stats.answers_in_5_to_12_words;
  }
  stats.query_words = distribution(std::move(query_words));
  stats.answer_words = distribution(std::move(answer_words));
  stats.answer_actions = distribution(std::move(answer_actions));
  return stats;
}

}  // namespace navscore
