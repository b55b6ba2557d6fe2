#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace navscore {

struct ConflictPolicy {
  enum class Kind { Zero, Penalize };
  Kind kind = Kind::Zero;
  // Multiplier applied as (1 - factor) when kind == Penalize.
  double factor = 0.0;

  static ConflictPolicy zero() { return {}; }
  static ConflictPolicy penalize(double f) { return {Kind::Penalize, f}; }

  // "zero" or "penalize(0.25)".
  static ConflictPolicy parse(std::string_view text);
  std::string to_string() const;

  friend bool operator==(const ConflictPolicy&, const ConflictPolicy&) = default;
};

// Weights and thresholds of the metric. Defaults are calibration choices,
// not values recovered from any dataset.
struct MetricConfig {
  double alpha = 0.4;  // weighted (direction-emphasized) token similarity
  double beta = 0.3;   // flow bonus
  double gamma = 0.3;  // plain token similarity
  double w = 0.7;      // interpolation: (1-w)*bert_f1 + w*enhanced
  double order_threshold = 0.6;
  double step_penalty_rate = 0.5;
  double boost_factor = 2.0;
  double special_case_boost = 0.1;
  ConflictPolicy conflict_policy;

  // Throws ConfigError naming the first violated constraint.
  void validate() const;

  friend bool operator==(const MetricConfig&, const MetricConfig&) = default;
};

inline constexpr double kWeightSumTolerance = 1e-9;

enum class BackendKind { Lexical, Remote };

// Everything the config file can carry: metric knobs plus data-file paths and
// backend selection.
struct Settings {
  MetricConfig metric;
  std::optional<std::filesystem::path> lexicon_path;
  std::optional<std::filesystem::path> conflict_pairs_path;
  BackendKind backend = BackendKind::Lexical;
  std::string endpoint = "http://127.0.0.1:8765";
  int timeout_ms = 5000;
};

// Applies `key = value` lines on top of `base`. Values may be bare or quoted;
// '#' starts a comment; unknown keys are errors. Relative paths are resolved
// against `base_dir`. Does not validate the metric; call validate() after all
// layers are applied.
Settings parse_settings(std::istream& in, Settings base = {},
                        const std::filesystem::path& base_dir = {},
                        std::string_view source = "<config>");
Settings load_settings(const std::filesystem::path& path, Settings base = {});

// Sets one key from its textual value; used by both the file parser and the CLI.
void apply_setting(Settings& s, std::string_view key, std::string_view value,
                   const std::filesystem::path& base_dir = {});

}  // namespace navscore
