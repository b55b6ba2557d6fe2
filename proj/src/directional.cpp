#include "navscore/directional.hpp"

#include <algorithm>
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

ConflictPairSet make_builtin() {
  ConflictPairSet pairs;
  pairs.add(Direction::Left, Direction::Right);
  pairs.add(Direction::Forward, Direction::Backward);
  pairs.add(Direction::Up, Direction::Down);
  return pairs;
}

bool contains(const std::vector<Direction>& v, Direction d) {
  return std::find(v.begin(), v.end(), d) != v.end();
}

}  // namespace

void ConflictPairSet::add(Direction a, Direction b) {
  if (a == b) {
    throw SchemaError(fmt::format("direction {} cannot oppose itself", to_string(a)));
  }
  pairs_.emplace(a, b);
  pairs_.emplace(b, a);
}

bool ConflictPairSet::opposes(Direction a, Direction b) const noexcept {
  return pairs_.contains({a, b});
}

const ConflictPairSet& ConflictPairSet::builtin() {
  static const ConflictPairSet pairs = make_builtin();
  return pairs;
}

ConflictPairSet parse_conflict_pairs(std::istream& in, std::string_view source) {
  ConflictPairSet pairs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) {
      body = body.substr(0, hash);
    }
    if (trim(body).empty()) continue;
    const auto tab = body.find('\t');
    if (tab == std::string_view::npos) {
      throw SchemaError(fmt::format("{}:{}: expected 'DIRECTION<TAB>DIRECTION'", source, lineno));
    }
    const auto lhs = trim(body.substr(0, tab));
    const auto rhs = trim(body.substr(tab + 1));
    const auto a = parse_direction(lhs);
    const auto b = parse_direction(rhs);
    if (!a || !b) {
      throw SchemaError(
          fmt::format("{}:{}: unknown direction '{}'", source, lineno, !a ? lhs : rhs));
    }
    try {
      pairs.add(*a, *b);
    } catch (const SchemaError& e) {
      throw SchemaError(fmt::format("{}:{}: {}", source, lineno, e.what()));
    }
  }
  return pairs;
}

ConflictPairSet load_conflict_pairs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(fmt::format("cannot open conflict-pair file '{}'", path.string()));
  return parse_conflict_pairs(in, path.string());
}

ConflictReport detect_conflict(const ActionSequence& ref, const ActionSequence& pred,
                               const ConflictPairSet& pairs) {
  ConflictReport report;
  const std::size_t aligned = std::min(ref.size(), pred.size());
  for (std::size_t i = 0; i < aligned; ++i) {
    const auto& r = ref.actions[i];
    const auto& p = pred.actions[i];
    if (pairs.opposes(r.direction, p.direction)) report.witnesses.push_back({r, p});
  }

  if (report.witnesses.empty()) {
    const auto ref_dirs = ref.directions();
    const auto pred_dirs = pred.directions();
    for (const auto& r : ref.actions) {
      if (contains(pred_dirs, r.direction)) continue;
      for (const auto& p : pred.actions) {
        if (contains(ref_dirs, p.direction)) continue;
        if (pairs.opposes(r.direction, p.direction)) report.witnesses.push_back({r, p});
      }
    }
  }

  report.conflict = !report.witnesses.empty();
  return report;
}

std::size_t lcs_length(const std::vector<Direction>& a, const std::vector<Direction>& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double order_similarity(const std::vector<Direction>& ref, const std::vector<Direction>& pred) {
  if (ref.empty() && pred.empty()) return 1.0;
  if (ref.empty() || pred.empty()) return 0.0;
  const auto longest = std::max(ref.size(), pred.size());
  return static_cast<double>(lcs_length(ref, pred)) / static_cast<double>(longest);
}

double order_similarity(const ActionSequence& ref, const ActionSequence& pred) {
  return order_similarity(ref.directions(), pred.directions());
}

double flow_bonus_for(double order_sim, std::size_t ref_steps, std::size_t step_delta,
                      const MetricConfig& cfg) {
  const double relative =
      static_cast<double>(step_delta) / static_cast<double>(std::max<std::size_t>(ref_steps, 1));
  const double step_factor = std::max(0.0, 1.0 - cfg.step_penalty_rate * relative);
  return std::clamp(order_sim * step_factor, 0.0, 1.0);
}

FlowAnalysis analyze_flow(const ActionSequence& ref, const ActionSequence& pred,
                          const MetricConfig& cfg) {
  FlowAnalysis flow;
  flow.ref_steps = ref.size();
  flow.pred_steps = pred.size();
  flow.step_delta = flow.ref_steps > flow.pred_steps ? flow.ref_steps - flow.pred_steps
                                                     : flow.pred_steps - flow.ref_steps;
  flow.order_similarity = order_similarity(ref, pred);

  if (ref.empty() && pred.empty()) {
    flow.flow_bonus = 1.0;
    return flow;
  }
  flow.critical_mismatch =
      !ref.empty() && !pred.empty() && flow.order_similarity < cfg.order_threshold;
  flow.flow_bonus = flow.critical_mismatch
                        ? 0.0
                        : flow_bonus_for(flow.order_similarity, flow.ref_steps, flow.step_delta, cfg);
  return flow;
}

}  // namespace navscore
