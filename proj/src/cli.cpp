#include "navscore/cli.hpp"

#include <cstdlib>
#include <functional>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "navscore/corpus.hpp"
#include "navscore/error.hpp"
#include "navscore/remote_backend.hpp"
#include "navscore/report.hpp"

namespace navscore::cli {

namespace {

// Flags shared by every subcommand that scores. Each maps 1:1 onto a config
// file key and, when given, overrides it.
struct ConfigFlags {
  std::string config_path;
  std::vector<std::pair<std::string, std::optional<std::string>>> overrides = {
      {"alpha", {}},           {"beta", {}},
      {"gamma", {}},           {"w", {}},
      {"order_threshold", {}}, {"step_penalty_rate", {}},
      {"boost_factor", {}},    {"special_case_boost", {}},
      {"conflict_policy", {}}, {"lexicon_path", {}},
      {"conflict_pairs_path", {}}, {"backend", {}},
      {"endpoint", {}},        {"timeout_ms", {}},
  };

  void attach(CLI::App& app) {
    app.add_option("--config", config_path,
                   "Config file (key = value); falls back to $NAVSCORE_CONFIG");
    for (auto& [key, value] : overrides) {
      std::string flag = "--" + key;
      std::replace(flag.begin(), flag.end(), '_', '-');
      if (key == "lexicon_path") flag = "--lexicon";
      if (key == "conflict_pairs_path") flag = "--conflict-pairs";
      app.add_option(flag, value, fmt::format("Override config key '{}'", key));
    }
  }

  Settings resolve() const {
    Settings s;
    std::string path = config_path;
    if (path.empty()) {
      if (const char* env = std::getenv("NAVSCORE_CONFIG"); env != nullptr) path = env;
    }
    if (!path.empty()) s = load_settings(path);
    for (const auto& [key, value] : overrides) {
      if (value) apply_setting(s, key, *value);
    }
    s.metric.validate();
    return s;
  }
};

// Lexicon/pairs/backend built from resolved settings; owns what the
// ScoringContext refers to.
struct Resources {
  Settings settings;
  DirectionLexicon lexicon;
  ConflictPairSet pairs;
  std::shared_ptr<const EmbeddingBackend> backend;

  explicit Resources(Settings s) : settings(std::move(s)) {
    lexicon = settings.lexicon_path ? load_lexicon(*settings.lexicon_path)
                                    : DirectionLexicon::builtin();
    pairs = settings.conflict_pairs_path ? load_conflict_pairs(*settings.conflict_pairs_path)
                                         : ConflictPairSet::builtin();
    if (settings.backend == BackendKind::Remote) {
      backend = remote_backend(settings.endpoint,
                               {std::chrono::milliseconds(settings.timeout_ms), 32});
    } else {
      backend = lexical_backend();
    }
  }

  ScoringContext context() const { return {*backend, lexicon, pairs, settings.metric}; }
};

std::string format_actions(const ActionSequence& seq) {
  std::vector<std::string> parts;
  for (const auto& a : seq.actions) {
    parts.push_back(fmt::format("{}@{}", to_string(a.direction), a.token_index));
  }
  return fmt::format("[{}]", fmt::join(parts, ", "));
}

std::string format_directions(const ActionSequence& seq) {
  std::vector<std::string_view> parts;
  for (const auto& a : seq.actions) parts.push_back(to_string(a.direction));
  return fmt::format("[{}]", fmt::join(parts, ", "));
}

const char* yes_no(bool b) { return b ? "true" : "false"; }

void print_breakdown(std::ostream& out, const std::string& ref, const std::string& pred,
                     const ScoreBreakdown& b, const DirectionLexicon& lex) {
  const auto row = [&](std::string_view name, const std::string& value) {
    out << fmt::format("{:<20} {}\n", name, value);
  };
  const auto score = [&](std::string_view name, double v) { row(name, fmt::format("{:.3f}", v)); };

  row("reference", ref);
  row("prediction", pred);
  row("reference_actions", format_actions(extract_actions(normalize(ref), lex)));
  row("prediction_actions", format_actions(extract_actions(normalize(pred), lex)));
  score("bert_f1", b.bert_f1);
  score("similarity", b.similarity);
  score("semantic_similarity", b.semantic_similarity);
  score("order_similarity", b.flow.order_similarity);
  row("step_delta", std::to_string(b.flow.step_delta));
  score("flow_bonus", b.flow_bonus);
  score("special_boost", b.special_boost);
  row("conflict", yes_no(b.conflict.conflict));
  for (const auto& w : b.conflict.witnesses) {
    row("  witness", fmt::format("{} ('{}') vs {} ('{}')", to_string(w.reference.direction),
                                 w.reference.surface, to_string(w.prediction.direction),
                                 w.prediction.surface));
  }
  row("critical_mismatch", yes_no(b.flow.critical_mismatch));
  score("enhanced_score", b.enhanced_score);
  score("final_score", b.final_score);
}

void print_distribution(std::ostream& out, std::string_view name, const CountDistribution& d) {
  out << fmt::format("{}: min={} median={} max={}\n", name, d.min, d.median, d.max);
  for (const auto& [value, count] : d.histogram) {
    out << fmt::format("  {:>3} | {:<4} {}\n", value, count, std::string(count, '#'));
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Direction- and sequence-aware scoring of navigation instructions", "navscore"};
  app.require_subcommand(1);

  // score
  auto* score_cmd = app.add_subcommand("score", "Score one prediction against one reference");
  std::string ref_text, pred_text;
  bool score_json = false;
  ConfigFlags score_flags;
  score_cmd->add_option("--ref", ref_text, "Reference instruction")->required();
  score_cmd->add_option("--pred", pred_text, "Predicted instruction")->required();
  score_cmd->add_flag("--json", score_json, "Print the breakdown as JSON");
  score_flags.attach(*score_cmd);

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "Score a prediction file against a corpus");
  std::string corpus_path, predictions_path, out_path, format = "json";
  bool strict = false, no_timestamp = false;
  unsigned jobs = 0;
  ConfigFlags eval_flags;
  eval_cmd->add_option("--corpus", corpus_path, "Corpus JSON (id -> {path, query, answer})")
      ->required();
  eval_cmd->add_option("--predictions", predictions_path, "Predictions (JSON object or JSON lines)")
      ->required();
  eval_cmd->add_option("--out", out_path, "Report output path")->required();
  eval_cmd->add_option("--format", format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}));
  eval_cmd->add_flag("--strict", strict, "Fail when an id is missing on either side");
  eval_cmd->add_flag("--no-timestamp", no_timestamp, "Omit the timestamp from report metadata");
  eval_cmd->add_option("--jobs", jobs, "Worker threads (0 = number of processors)");
  eval_flags.attach(*eval_cmd);

  // inspect
  auto* inspect_cmd = app.add_subcommand("inspect", "Show tokens and extracted actions");
  std::string inspect_text, inspect_lexicon;
  inspect_cmd->add_option("--text", inspect_text, "Instruction text")->required();
  inspect_cmd->add_option("--lexicon", inspect_lexicon, "Lexicon file (phrase<TAB>DIRECTION)");

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "Corpus length and action statistics");
  std::string stats_corpus, stats_lexicon;
  stats_cmd->add_option("--corpus", stats_corpus, "Corpus JSON")->required();
  stats_cmd->add_option("--lexicon", stats_lexicon, "Lexicon file (phrase<TAB>DIRECTION)");

  try {
    std::vector<std::string> rest(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (score_cmd->parsed()) {
      const Resources res(score_flags.resolve());
      const auto b = final_score(normalize(ref_text), normalize(pred_text), res.context());
      if (score_json) {
        auto j = to_json(b);
        j["reference"] = ref_text;
        j["prediction"] = pred_text;
        const auto info = res.backend->info();
        j["backend"] = {{"name", info.name}, {"model", info.model}, {"dim", info.dim}};
        out << j.dump(2) << '\n';
      } else {
        print_breakdown(out, ref_text, pred_text, b, res.lexicon);
      }
    } else if (eval_cmd->parsed()) {
      const Resources res(eval_flags.resolve());
      const auto corpus = load_corpus(corpus_path);
      const auto predictions = load_predictions(predictions_path);
      EvaluateOptions opts;
      opts.strictness = strict ? Strictness::Strict : Strictness::SkipMissing;
      opts.jobs = jobs;
      opts.timestamp = !no_timestamp;
      const auto report = evaluate_corpus(corpus, predictions, res.context(), opts);
      emit_report(report, format == "csv" ? ReportFormat::Csv : ReportFormat::Json, out_path);

      const auto& a = report.aggregates;
      const auto mean = [](const std::optional<Statistic>& s) {
        return s ? fmt::format("{:.4f}", s->mean) : std::string("n/a");
      };
      const auto& c = report.counts;
      out << fmt::format(
          "records={} missing={} unknown={} conflicts={} critical_mismatches={} "
          "mean_bert_f1={} mean_enhanced_score={} mean_final_score={}\n",
          c.records, c.missing_predictions, c.unknown_predictions, c.conflicts,
          c.critical_mismatches, mean(a.bert_f1), mean(a.enhanced_score), mean(a.final_score));
      for (const auto& id : report.missing_ids) err << "warning: no prediction for id '" << id << "'\n";
      for (const auto& id : report.unknown_ids) err << "warning: prediction id '" << id << "' not in corpus\n";
    } else if (inspect_cmd->parsed()) {
      const auto lex = inspect_lexicon.empty() ? DirectionLexicon::builtin()
                                               : load_lexicon(inspect_lexicon);
      const auto instr = normalize(inspect_text);
      const auto seq = extract_actions(instr, lex);
      out << fmt::format("tokens ({}):", instr.tokens.size());
      for (std::size_t i = 0; i < instr.tokens.size(); ++i) {
        out << fmt::format(" [{}]{}", i, instr.tokens[i]);
      }
      out << '\n';
      out << fmt::format("actions ({}):\n", seq.size());
      for (const auto& a : seq.actions) {
        out << fmt::format("  {}@{} \"{}\" (tokens {}-{})\n", to_string(a.direction),
                           a.token_index, a.surface, a.phrase_begin, a.token_index);
      }
      out << "directions: " << format_directions(seq) << '\n';
    } else if (stats_cmd->parsed()) {
      const auto lex = stats_lexicon.empty() ? DirectionLexicon::builtin()
                                             : load_lexicon(stats_lexicon);
      const auto stats = corpus_stats(load_corpus(stats_corpus), lex);
      out << "records: " << stats.records << '\n';
      print_distribution(out, "query_words", stats.query_words);
      out << fmt::format("queries_with_4_to_8_words: {}/{}\n", stats.queries_in_4_to_8_words,
                         stats.records);
      print_distribution(out, "answer_words", stats.answer_words);
      out << fmt::format("answers_with_5_to_12_words: {}/{}\n", stats.answers_in_5_to_12_words,
                         stats.records);
      print_distribution(out, "answer_actions", stats.answer_actions);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const BackendUnavailable& e) {
    err << "error: embedding backend unavailable: " << e.what() << '\n';
    return kBackendUnavailable;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kDomainError;
  }
  return kOk;
}

}  // namespace navscore::cli
