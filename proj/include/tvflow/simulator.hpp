#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include <json.hpp>

#include "tvflow/action.hpp"

namespace tvflow::sim {

struct NoOk {
  friend bool operator==(const NoOk&, const NoOk&) = default;
};
struct OpenScreen {
  std::string screen;
  std::string focus;
  friend bool operator==(const OpenScreen&, const OpenScreen&) = default;
};
struct InternalToggle {
  std::string key;
  friend bool operator==(const InternalToggle&, const InternalToggle&) = default;
};
using OkBehavior = std::variant<NoOk, OpenScreen, InternalToggle>;

/// A focusable element. `nav` maps LEFT/RIGHT/UP/DOWN to element ids on the same screen.
struct Element {
  std::string id;
  std::string label;
  bool container = false;
  std::array<std::optional<std::string>, 4> nav;
  OkBehavior ok;

  std::optional<std::string>& nav_for(Action a) { return nav[index_of(a)]; }
  const std::optional<std::string>& nav_for(Action a) const { return nav[index_of(a)]; }
};

struct Screen {
  std::string id;
  std::vector<Element> elements;
  std::optional<std::string> back_target;
};

/// Chains LEFT/RIGHT between consecutive ids (ends left open). Ids must be
/// elements of `screen`; throws Error otherwise.
Screen auto_wire_list(Screen screen, std::span<const std::string> ids);

/// Declarative description of a simulated app. Build with AppSpec::create,
/// which validates references and indexes ids.
class AppSpec {
 public:
  static AppSpec create(std::vector<Screen> screens, std::string start_screen,
                        std::string start_focus);

  const std::vector<Screen>& screens() const noexcept { return screens_; }
  const std::string& start_screen() const noexcept { return start_screen_; }
  const std::string& start_focus() const noexcept { return start_focus_; }

  struct Location {
    std::uint32_t screen = 0;
    std::uint32_t element = 0;
    friend bool operator==(const Location&, const Location&) = default;
    friend auto operator<=>(const Location&, const Location&) = default;
  };

  std::optional<std::uint32_t> screen_index(std::string_view id) const;
  std::optional<Location> locate(std::string_view screen_id, std::string_view element_id) const;
  const Screen& screen(std::uint32_t i) const { return screens_[i]; }
  const Element& element(Location l) const { return screens_[l.screen].elements[l.element]; }
  /// Resolved navigation target (same screen) for a directional action.
  std::optional<std::uint32_t> nav_target(Location l, Action a) const;
  std::size_t element_count() const noexcept { return element_count_; }

 private:
  AppSpec() = default;
  std::vector<Screen> screens_;
  std::string start_screen_;
  std::string start_focus_;
  std::size_t element_count_ = 0;
  std::unordered_map<std::string, std::uint32_t> screen_idx_;
  std::vector<std::unordered_map<std::string, std::uint32_t>> element_idx_;  // per screen
  // nav_[screen][element][dir], resolved to element indices; -1 means none
  std::vector<std::vector<std::array<std::int32_t, 4>>> nav_;
};

/// Where the user is and what the app remembers.
struct SimState {
  AppSpec::Location at;
  std::map<std::string, bool> flags;
  std::vector<AppSpec::Location> history;

  friend bool operator==(const SimState&, const SimState&) = default;
};

enum class Effect { Moved, Opened, Internal, Backed, Noop };
std::string_view to_string(Effect e) noexcept;

struct StepResult {
  SimState state;
  Effect effect = Effect::Noop;
};

SimState initial_state(const AppSpec& spec);

/// One button press. Directional presses follow the nav map; OK opens a screen
/// (pushing history), toggles a flag, or does nothing; BACK pops history, falls
/// back to the screen's back_target (focusing its first element), or does nothing.
StepResult step(const AppSpec& spec, const SimState& state, Action action);

/// Replays presses from the initial state.
SimState replay(const AppSpec& spec, std::span<const Action> actions);

AppSpec app_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AppSpec& spec);
AppSpec load_app(std::istream& in);
AppSpec load_app_file(const std::string& path);
void save_app(const AppSpec& spec, std::ostream& out);

/// Single screen "list" holding `n` auto-wired items; item i opens nothing.
/// Models an effectively unbounded content row for crawl-budget tests.
AppSpec generated_list(std::size_t n);

}  // namespace tvflow::sim
