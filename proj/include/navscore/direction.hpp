#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace navscore {

enum class Direction : std::uint8_t {
  Left,
  Right,
  Forward,
  Backward,
  Up,
  Down,
  Stop,
  TurnAround,
};

inline constexpr std::array<Direction, 8> kAllDirections = {
    Direction::Left, Direction::Right, Direction::Forward,  Direction::Backward,
    Direction::Up,   Direction::Down,  Direction::Stop,     Direction::TurnAround,
};

// Upper-case label used in data files and reports, e.g. "TURN_AROUND".
std::string_view to_string(Direction d) noexcept;

// Inverse of to_string. Accepts only the exact upper-case labels.
std::optional<Direction> parse_direction(std::string_view label) noexcept;

}  // namespace navscore
