// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "navscore/corpus.hpp"
#include "navscore/report.hpp"
#include "test_support.hpp"

namespace {

using namespace navscore;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
  void check(bool cond, const std::string& why) {
    if (!cond) fail(why);
  }
};

struct Criterion {
  std::string name;
  double budget_seconds;  // 0 = no runtime bound
  std::function<Outcome()> body;
};

ScoringContext context(const MetricConfig& cfg) {
  return {*lexical_backend(), DirectionLexicon::builtin(), ConflictPairSet::builtin(), cfg};
}

// Instructions assembled from the shipped lexicon's phrases plus filler.
class LexiconGrammar {
 public:
  explicit LexiconGrammar(std::uint32_t seed) : rng_(seed) {
    for (const auto& [phrase, dir] : DirectionLexicon::builtin().entries()) {
      std::string joined;
      for (const auto& t : phrase) joined += (joined.empty() ? "" : " ") + t;
      phrases_.push_back(joined);
    }
  }

  std::string operator()() {
    static const std::vector<std::string> fillers = {
        "", " for a few steps", " to the door", " past the table", " until the exit"};
    static const std::vector<std::string> joins = {", then ", " and ", " then ", ". "};
    std::string out;
    const int steps = pick(1, 4);
    for (int i = 0; i < steps; ++i) {
      if (i > 0) out += joins[pick(0, joins.size() - 1)];
      out += phrases_[pick(0, phrases_.size() - 1)] + fillers[pick(0, fillers.size() - 1)];
    }
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
    return out + ".";
  }

 private:
  int pick(std::size_t lo, std::size_t hi) {
    return static_cast<int>(std::uniform_int_distribution<std::size_t>(lo, hi)(rng_));
  }
  std::mt19937 rng_;
  std::vector<std::string> phrases_;
};

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

Outcome reversal_zeroing() {
  Outcome o;
  const MetricConfig cfg;
  const auto b = final_score(normalize("turn left then walk forward"),
                             normalize("walk forward then turn left"), context(cfg));
  o.check(b.flow.critical_mismatch, "critical_mismatch not set");
  o.check(b.enhanced_score == 0.0, fmt::format("enhanced_score = {}", b.enhanced_score));
  const double expected = (1.0 - cfg.w) * b.bert_f1;
  o.check(std::abs(b.final_score - expected) <= 1e-12,
          fmt::format("final_score {} vs (1-w)*bert_f1 {}", b.final_score, expected));
  if (o.ok) o.detail = fmt::format("enhanced=0, final={:.6f}", b.final_score);
  return o;
}

Outcome identity_suite() {
  Outcome o;
  const MetricConfig cfg;
  LexiconGrammar gen(2024);
  for (int i = 0; i < 100; ++i) {
    const auto text = gen();
    const auto instr = normalize(text);
    const auto b = final_score(instr, instr, context(cfg));
    o.check(b.final_score == 1.0, fmt::format("final_score('{}') = {:.17g}", text, b.final_score));
  }
  if (o.ok) o.detail = "100/100 exactly 1.0";
  return o;
}

Outcome boundedness_monotonicity() {
  Outcome o;
  LexiconGrammar gen(77);
  testing::InstructionGenerator mixed(78);
  std::mt19937 rng(79);
  MetricConfig cfg, at0, at1;
  at0.w = 0.0;
  at1.w = 1.0;
  constexpr int kPairs = 1200;
  for (int i = 0; i < kPairs; ++i) {
    const auto ref = normalize(i % 2 == 0 ? gen() : mixed());
    const auto pred = normalize(i % 3 == 0 ? gen() : mixed());
    const auto b = final_score(ref, pred, context(cfg));
    for (double x : {b.similarity, b.flow_bonus, b.semantic_similarity, b.special_boost,
                     b.enhanced_score, b.bert_f1, b.final_score, b.flow.order_similarity}) {
      o.check(in_unit(x), fmt::format("component {} out of [0,1] for '{}' / '{}'", x, ref.raw,
                                      pred.raw));
    }
    const auto b0 = final_score(ref, pred, context(at0));
    const auto b1 = final_score(ref, pred, context(at1));
    o.check(b0.final_score == b0.bert_f1, "w=0 endpoint not exact");
    o.check(b1.final_score == b1.enhanced_score, "w=1 endpoint not exact");

    // Synthetic step growth: hold order similarity and reference length fixed.
    const double order = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const auto ref_steps = std::uniform_int_distribution<std::size_t>(0, 6)(rng);
    double prev = flow_bonus_for(order, ref_steps, 0, cfg);
    for (std::size_t delta = 1; delta <= 8; ++delta) {
      const double cur = flow_bonus_for(order, ref_steps, delta, cfg);
      o.check(cur <= prev && in_unit(cur), "flow_bonus increased with step_delta");
      prev = cur;
    }
  }
  // Appending extra steps to a prediction never raises its flow bonus.
  for (int i = 0; i < 200; ++i) {
    const auto ref = extract_actions(normalize(gen()), DirectionLexicon::builtin());
    std::string longer = ref.source.raw;
    double prev = analyze_flow(ref, ref, cfg).flow_bonus;
    for (int k = 0; k < 4; ++k) {
      longer += " then stop";
      const double cur =
          analyze_flow(ref, extract_actions(normalize(longer), DirectionLexicon::builtin()), cfg)
              .flow_bonus;
      o.check(cur <= prev, "appended steps raised flow_bonus");
      prev = cur;
    }
  }
  if (o.ok) o.detail = fmt::format("{} pairs", kPairs);
  return o;
}

Outcome conflict_properties() {
  Outcome o;
  const auto& pairs = ConflictPairSet::builtin();
  auto single = [](Direction d) {
    ActionSequence s;
    s.actions.push_back({d, 0, 0, std::string(to_string(d))});
    return s;
  };
  int checked = 0;
  for (Direction a : kAllDirections) {
    for (Direction b : kAllDirections) {
      const bool ab = detect_conflict(single(a), single(b), pairs).conflict;
      const bool ba = detect_conflict(single(b), single(a), pairs).conflict;
      o.check(ab == ba, fmt::format("asymmetric for ({}, {})", to_string(a), to_string(b)));
      if (a == b) o.check(!ab, fmt::format("reflexive conflict on {}", to_string(a)));
      o.check(ab == pairs.opposes(a, b), "conflict disagrees with pair set");
      ++checked;
    }
  }
  if (o.ok) o.detail = fmt::format("{} ordered pairs", checked);
  return o;
}

Outcome oracle_fixtures() {
  Outcome o;
  const auto corpus = load_corpus(testing::fixture("golden_corpus.json"));
  const auto preds = load_predictions(testing::fixture("golden_predictions.json"));
  const auto expected = testing::load_json(testing::fixture("golden_expected.json"));
  const MetricConfig cfg;
  const auto report = evaluate_corpus(corpus, preds, context(cfg));
  o.check(report.per_record.size() == 20, "golden corpus must have 20 scored pairs");
  constexpr double kTol = 1e-9;
  std::size_t fields = 0;
  for (const auto& rec : report.per_record) {
    const auto& e = expected["records"][rec.id];
    const auto& b = rec.breakdown;
    const std::pair<const char*, double> reals[] = {
        {"bert_f1", b.bert_f1},
        {"similarity", b.similarity},
        {"semantic_similarity", b.semantic_similarity},
        {"flow_bonus", b.flow_bonus},
        {"order_similarity", b.flow.order_similarity},
        {"special_boost", b.special_boost},
        {"enhanced_score", b.enhanced_score},
        {"final_score", b.final_score},
    };
    for (const auto& [key, value] : reals) {
      const double want = e[key].get<double>();
      o.check(std::abs(value - want) <= kTol,
              fmt::format("{}.{}: {:.17g} vs oracle {:.17g}", rec.id, key, value, want));
      ++fields;
    }
    const std::pair<const char*, std::size_t> counts[] = {
        {"ref_steps", b.flow.ref_steps},
        {"pred_steps", b.flow.pred_steps},
        {"step_delta", b.flow.step_delta},
    };
    for (const auto& [key, value] : counts) {
      o.check(value == e[key].get<std::size_t>(), fmt::format("{}.{} differs", rec.id, key));
      ++fields;
    }
    o.check(b.flow.critical_mismatch == e["critical_mismatch"].get<bool>(),
            rec.id + ".critical_mismatch differs");
    o.check(b.conflict.conflict == e["conflict"].get<bool>(), rec.id + ".conflict differs");
    std::vector<std::vector<std::string>> witnesses;
    for (const auto& w : b.conflict.witnesses) {
      witnesses.push_back({std::string(to_string(w.reference.direction)),
                           std::string(to_string(w.prediction.direction))});
    }
    o.check(witnesses == e["witnesses"].get<std::vector<std::vector<std::string>>>(),
            rec.id + ".witnesses differ");
    std::vector<std::string> ref_dirs, pred_dirs;
    for (Direction d :
         extract_actions(normalize(rec.reference), DirectionLexicon::builtin()).directions()) {
      ref_dirs.emplace_back(to_string(d));
    }
    for (Direction d :
         extract_actions(normalize(rec.prediction), DirectionLexicon::builtin()).directions()) {
      pred_dirs.emplace_back(to_string(d));
    }
    o.check(ref_dirs == e["ref_directions"].get<std::vector<std::string>>(),
            rec.id + ".ref_directions differ");
    o.check(pred_dirs == e["pred_directions"].get<std::vector<std::string>>(),
            rec.id + ".pred_directions differ");
    fields += 6;
  }
  for (const char* key : {"bert_f1", "enhanced_score", "final_score"}) {
    const auto& agg = key == std::string("bert_f1")          ? report.aggregates.bert_f1
                      : key == std::string("enhanced_score") ? report.aggregates.enhanced_score
                                                              : report.aggregates.final_score;
    const auto& e = expected["aggregates"][key];
    o.check(agg.has_value(), "missing aggregate");
    if (!agg) continue;
    const std::pair<const char*, double> stats[] = {
        {"mean", agg->mean}, {"median", agg->median}, {"min", agg->min}, {"max", agg->max}};
    for (const auto& [name, value] : stats) {
      o.check(std::abs(value - e[name].get<double>()) <= kTol,
              fmt::format("aggregate {}.{} differs", key, name));
      ++fields;
    }
  }
  if (o.ok) o.detail = fmt::format("{} fields within 1e-9", fields);
  return o;
}

Outcome corpus_pipeline() {
  Outcome o;
  testing::TempDir tmp;
  const auto path = tmp.write("augmented_corpus.json", R"({
  "0": {"path": "restaurant/bistro_view_of_tables.jpg",
        "query": "Are there any obstacles in front of me", "answer": "Yes, there is a table."},
  "0_1": {"path": "restaurant/bistro_view_of_tables.jpg",
          "query": "Anything blocking my path?", "answer": "Table ahead."},
  "0_2": {"path": "restaurant/bistro_view_of_tables.jpg",
          "query": "Is my way clear?", "answer": "No, table in front."},
  "1": {"path": "restaurant/food2_450.jpg",
        "query": "Is there anything in my way", "answer": "Yes, a table is in front of you."},
  "1_1": {"path": "restaurant/food2_450.jpg", "query": "Obstruction ahead?",
          "answer": "Table in front."},
  "1_2": {"path": "restaurant/food2_450.jpg", "query": "Blocked path?",
          "answer": "Yes, table there."}
})");
  const auto corpus = load_corpus(path);
  std::vector<std::string> ids;
  for (const auto& r : corpus) ids.push_back(r.id);
  o.check(ids == std::vector<std::string>{"0", "0_1", "0_2", "1", "1_1", "1_2"},
          "augmented ids not preserved");

  std::vector<PredictionRecord> preds;
  for (const auto& r : corpus) preds.push_back({r.id, r.answer});
  const auto report = evaluate_corpus(corpus, preds, context(MetricConfig{}));
  o.check(report.aggregates.final_score && report.aggregates.final_score->mean == 1.0,
          "mean final_score != 1.0 for verbatim predictions");

  const auto out = tmp.file("report.json");
  emit_report(report, ReportFormat::Json, out);
  const auto back = read_report_json(out);
  o.check(back.aggregates == report.aggregates, "aggregates changed across JSON round trip");
  o.check(back.per_record.size() == report.per_record.size(), "record count changed");
  o.check(aggregates_consistent(back), "recomputed aggregates differ from stored ones");
  if (o.ok) o.detail = fmt::format("{} records, mean final 1.0, round trip exact", corpus.size());
  return o;
}

Outcome cli_determinism() {
  Outcome o;
  testing::TempDir tmp;
  std::vector<std::string> reports;
  for (const char* name : {"run1.json", "run2.json"}) {
    const auto cmd = fmt::format(
        "'{}' evaluate --corpus '{}' --predictions '{}' --out '{}' --no-timestamp > '{}' 2>&1",
        NAVSCORE_CLI_PATH, testing::fixture("golden_corpus.json").string(),
        testing::fixture("golden_predictions.json").string(), tmp.file(name).string(),
        tmp.file(std::string(name) + ".log").string());
    const int rc = std::system(cmd.c_str());
    o.check(rc == 0, fmt::format("navscore evaluate exited with {}", rc));
    reports.push_back(testing::slurp(tmp.file(name)));
  }
  o.check(!reports[0].empty(), "empty report");
  o.check(reports[0] == reports[1], "reports differ between runs");
  if (o.ok) o.detail = fmt::format("{} bytes identical", reports[0].size());
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"reversal zeroing", 1.0, reversal_zeroing},
      {"identity suite", 5.0, identity_suite},
      {"boundedness/monotonicity", 30.0, boundedness_monotonicity},
      {"conflict properties", 1.0, conflict_properties},
      {"oracle fixtures", 5.0, oracle_fixtures},
      {"corpus pipeline", 5.0, corpus_pipeline},
      {"determinism", 0.0, cli_determinism},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    if (c.budget_seconds > 0 && secs >= c.budget_seconds) {
      o.fail(fmt::format("runtime {:.3f}s exceeds {:.0f}s budget", secs, c.budget_seconds));
    }
    if (!o.ok) ++failures;
    std::cout << fmt::format("[{}] {:<26} {:>8.3f}s  {}\n", o.ok ? "PASS" : "FAIL", c.name, secs,
                             o.detail);
  }
  std::cout << fmt::format("{}/{} acceptance criteria passed\n", criteria.size() - failures,
                           criteria.size());
  return failures == 0 ? 0 : 1;
}
