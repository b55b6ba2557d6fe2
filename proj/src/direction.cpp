#include "navscore/direction.hpp"

namespace navscore {

namespace {
constexpr std::array<std::string_view, 8> kLabels = {
    "LEFT", "RIGHT", "FORWARD", "BACKWARD", "UP", "DOWN", "STOP", "TURN_AROUND",
};
}  // namespace

std::string_view to_string(Direction d) noexcept {
  return kLabels[static_cast<std::size_t>(d)];
}

std::optional<Direction> parse_direction(std::string_view label) noexcept {
  for (std::size_t i = 0; i < kLabels.size(); ++i) {
    if (kLabels[i] == label) return kAllDirections[i];
  }
  return std::nullopt;
}

}  // namespace navscore
