#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace tvflow {

/// Remote-control button presses. These six are the only input actions.
enum class Action : std::uint8_t { Left, Right, Up, Down, Ok, Back };

inline constexpr std::size_t kActionCount = 6;

inline constexpr std::array<Action, kActionCount> kAllActions = {
    Action::Left, Action::Right, Action::Up, Action::Down, Action::Ok, Action::Back};

/// Directional subset, in the order used by navigation maps.
inline constexpr std::array<Action, 4> kDirections = {Action::Left, Action::Right, Action::Up,
                                                      Action::Down};

constexpr std::size_t index_of(Action a) noexcept { return static_cast<std::size_t>(a); }

constexpr std::string_view to_string(Action a) noexcept {
  switch (a) {
    case Action::Left: return "LEFT";
    case Action::Right: return "RIGHT";
    case Action::Up: return "UP";
    case Action::Down: return "DOWN";
    case Action::Ok: return "OK";
    case Action::Back: return "BACK";
  }
  return "?";
}

/// Exact, case-sensitive match against the wire spellings.
constexpr std::optional<Action> parse_action(std::string_view s) noexcept {
  for (Action a : kAllActions) {
    if (to_string(a) == s) return a;
  }
  return std::nullopt;
}

constexpr bool is_directional(Action a) noexcept { return index_of(a) < 4; }

}  // namespace tvflow
