#include "navscore/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "navscore/error.hpp"

namespace navscore {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(std::string_view key, std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
    throw ConfigError(fmt::format("{}: expected a number, got '{}'", key, text));
  }
  return v;
}

void require_range(std::string_view key, double v, double lo, double hi) {
  if (!(v >= lo && v <= hi)) {
    throw ConfigError(fmt::format("{} = {} outside [{}, {}]", key, v, lo, hi));
  }
}

std::string_view unquote(std::string_view v) {
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) {
    return v.substr(1, v.size() - 2);
  }
  return v;
}

// Strips a trailing comment unless the '#' sits inside quotes.
std::string_view strip_comment(std::string_view line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quote != 0) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

std::filesystem::path resolve(const std::filesystem::path& base_dir, std::string_view v) {
  std::filesystem::path p{std::string(v)};
  if (p.is_relative() && !base_dir.empty()) return base_dir / p;
  return p;
}

}  // namespace

ConflictPolicy ConflictPolicy::parse(std::string_view text) {
  text = trim(text);
  if (text == "zero") return zero();
  constexpr std::string_view prefix = "penalize(";
  if (text.starts_with(prefix) && text.ends_with(")")) {
    const double f = parse_double("conflict_policy",
                                  text.substr(prefix.size(), text.size() - prefix.size() - 1));
    return penalize(f);
  }
  throw ConfigError(
      fmt::format("conflict_policy: expected 'zero' or 'penalize(<factor>)', got '{}'", text));
}

std::string ConflictPolicy::to_string() const {
  if (kind == Kind::Zero) return "zero";
  return fmt::format("penalize({})", factor);
}

void MetricConfig::validate() const {
  require_range("alpha", alpha, 0.0, 1.0);
  require_range("beta", beta, 0.0, 1.0);
  require_range("gamma", gamma, 0.0, 1.0);
  const double sum = alpha + beta + gamma;
  if (std::abs(sum - 1.0) > kWeightSumTolerance) {
    throw ConfigError(fmt::format("alpha + beta + gamma = {} (must equal 1)", sum));
  }
  require_range("w", w, 0.0, 1.0);
  require_range("order_threshold", order_threshold, 0.0, 1.0);
  if (!(step_penalty_rate >= 0.0) || !std::isfinite(step_penalty_rate)) {
    throw ConfigError(fmt::format("step_penalty_rate = {} must be nonnegative", step_penalty_rate));
  }
  if (!(boost_factor >= 1.0) || !std::isfinite(boost_factor)) {
    throw ConfigError(fmt::format("boost_factor = {} must be >= 1", boost_factor));
  }
  require_range("special_case_boost", special_case_boost, 0.0, 1.0);
  if (conflict_policy.kind == ConflictPolicy::Kind::Penalize) {
    require_range("conflict_policy factor", conflict_policy.factor, 0.0, 1.0);
  }
}

void apply_setting(Settings& s, std::string_view key, std::string_view value,
                   const std::filesystem::path& base_dir) {
  value = unquote(trim(value));
  auto& m = s.metric;
  if (key == "alpha") {
    m.alpha = parse_double(key, value);
  } else if (key == "beta") {
    m.beta = parse_double(key, value);
  } else if (key == "gamma") {
    m.gamma = parse_double(key, value);
  } else if (key == "w") {
    m.w = parse_double(key, value);
  } else if (key == "order_threshold") {
    m.order_threshold = parse_double(key, value);
  } else if (key == "step_penalty_rate") {
    m.step_penalty_rate = parse_double(key, value);
  } else if (key == "boost_factor") {
    m.boost_factor = parse_double(key, value);
  } else if (key == "special_case_boost") {
    m.special_case_boost = parse_double(key, value);
  } else if (key == "conflict_policy") {
    m.conflict_policy = ConflictPolicy::parse(value);
  } else if (key == "lexicon_path") {
    s.lexicon_path = resolve(base_dir, value);
  } else if (key == "conflict_pairs_path") {
    s.conflict_pairs_path = resolve(base_dir, value);
  } else if (key == "backend") {
    if (value == "lexical") {
      s.backend = BackendKind::Lexical;
    } else if (value == "remote") {
      s.backend = BackendKind::Remote;
    } else {
      throw ConfigError(fmt::format("backend: expected 'lexical' or 'remote', got '{}'", value));
    }
  } else if (key == "endpoint") {
    if (value.empty()) throw ConfigError("endpoint must not be empty");
    s.endpoint = std::string(value);
  } else if (key == "timeout_ms") {
    const double t = parse_double(key, value);
    if (t <= 0 || t != std::floor(t) || t > 3'600'000) {
      throw ConfigError(fmt::format("timeout_ms: expected a positive integer, got '{}'", value));
    }
    s.timeout_ms = static_cast<int>(t);
  } else {
    throw ConfigError(fmt::format("unknown config key '{}'", key));
  }
}

Settings parse_settings(std::istream& in, Settings base, const std::filesystem::path& base_dir,
                        std::string_view source) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = trim(strip_comment(line));
    if (body.empty()) continue;
    if (body.front() == '[') continue;  // TOML table headers carry no meaning here
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(fmt::format("{}:{}: expected 'key = value'", source, lineno));
    }
    try {
      apply_setting(base, trim(body.substr(0, eq)), body.substr(eq + 1), base_dir);
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("{}:{}: {}", source, lineno, e.what()));
    }
  }
  return base;
}

Settings load_settings(const std::filesystem::path& path, Settings base) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
  return parse_settings(in, std::move(base), path.parent_path(), path.string());
}

}  // namespace navscore
