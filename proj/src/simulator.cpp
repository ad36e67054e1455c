#include "tvflow/simulator.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <unordered_set>

#include "tvflow/error.hpp"
#include "tvflow/json_io.hpp"

namespace tvflow::sim {

std::string_view to_string(Effect e) noexcept {
  switch (e) {
    case Effect::Moved: return "MOVED";
    case Effect::Opened: return "OPENED";
    case Effect::Internal: return "INTERNAL";
    case Effect::Backed: return "BACKED";
    case Effect::Noop: return "NOOP";
  }
  return "?";
}

Screen auto_wire_list(Screen screen, std::span<const std::string> ids) {
  std::vector<Element*> chain;
  chain.reserve(ids.size());
  for (const auto& id : ids) {
    auto it = std::find_if(screen.elements.begin(), screen.elements.end(),
                           [&](const Element& e) { return e.id == id; });
    if (it == screen.elements.end()) {
      throw Error("auto_wire_list: '" + id + "' is not an element of screen '" + screen.id + "'");
    }
    chain.push_back(&*it);
  }
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    chain[i]->nav_for(Action::Right) = chain[i + 1]->id;
    chain[i + 1]->nav_for(Action::Left) = chain[i]->id;
  }
  return screen;
}

AppSpec AppSpec::create(std::vector<Screen> screens, std::string start_screen,
                        std::string start_focus) {
  AppSpec spec;
  spec.screens_ = std::move(screens);
  spec.start_screen_ = std::move(start_screen);
  spec.start_focus_ = std::move(start_focus);

  std::vector<std::string> problems;
  for (std::uint32_t s = 0; s < spec.screens_.size(); ++s) {
    const Screen& screen = spec.screens_[s];
    if (!spec.screen_idx_.emplace(screen.id, s).second) {
      problems.push_back("duplicate screen id '" + screen.id + "'");
    }
    if (screen.elements.empty()) problems.push_back("screen '" + screen.id + "' has no elements");
    spec.element_count_ += screen.elements.size();
  }
  spec.element_idx_.resize(spec.screens_.size());
  std::unordered_set<std::string_view> all_ids;
  all_ids.reserve(spec.element_count_);
  for (std::uint32_t s = 0; s < spec.screens_.size(); ++s) {
    const auto& elements = spec.screens_[s].elements;
    auto& idx = spec.element_idx_[s];
    idx.reserve(elements.size());
    for (std::uint32_t e = 0; e < elements.size(); ++e) {
      idx.emplace(elements[e].id, e);
      if (!all_ids.insert(elements[e].id).second) {
        problems.push_back("duplicate element id '" + elements[e].id + "'");
      }
    }
  }

  spec.nav_.resize(spec.screens_.size());
  for (std::uint32_t s = 0; s < spec.screens_.size(); ++s) {
    const Screen& screen = spec.screens_[s];
    auto& nav = spec.nav_[s];
    nav.resize(screen.elements.size());
    for (std::uint32_t e = 0; e < screen.elements.size(); ++e) {
      const Element& el = screen.elements[e];
      for (Action a : kDirections) {
        nav[e][index_of(a)] = -1;
        const auto& target = el.nav_for(a);
        if (!target) continue;
        auto loc = spec.locate(screen.id, *target);
        if (!loc) {
          problems.push_back("element '" + el.id + "' " + std::string(to_string(a)) +
                             " targets '" + *target + "', which is not on screen '" + screen.id +
                             "'");
          continue;
        }
        nav[e][index_of(a)] = static_cast<std::int32_t>(loc->element);
      }
      if (const auto* open = std::get_if<OpenScreen>(&el.ok)) {
        if (!spec.screen_index(open->screen)) {
          problems.push_back("element '" + el.id + "' opens unknown screen '" + open->screen + "'");
        } else if (!spec.locate(open->screen, open->focus)) {
          problems.push_back("element '" + el.id + "' opens '" + open->screen +
                             "' with focus '" + open->focus + "' not on that screen");
        }
      } else if (const auto* toggle = std::get_if<InternalToggle>(&el.ok)) {
        if (toggle->key.empty()) problems.push_back("element '" + el.id + "' toggles an empty key");
      }
    }
    if (screen.back_target && !spec.screen_index(*screen.back_target)) {
      problems.push_back("screen '" + screen.id + "' has unknown back_target '" +
                         *screen.back_target + "'");
    }
  }

  if (!spec.screen_index(spec.start_screen_)) {
    problems.push_back("unknown start screen '" + spec.start_screen_ + "'");
  } else if (!spec.locate(spec.start_screen_, spec.start_focus_)) {
    problems.push_back("start focus '" + spec.start_focus_ + "' is not on the start screen");
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
  return spec;
}

std::optional<std::uint32_t> AppSpec::screen_index(std::string_view id) const {
  auto it = screen_idx_.find(std::string(id));
  if (it == screen_idx_.end()) return std::nullopt;
  return it->second;
}

std::optional<AppSpec::Location> AppSpec::locate(std::string_view screen_id,
                                                  std::string_view element_id) const {
  auto s = screen_index(screen_id);
  if (!s) return std::nullopt;
  const auto& idx = element_idx_[*s];
  auto it = idx.find(std::string(element_id));
  if (it == idx.end()) return std::nullopt;
  return Location{*s, it->second};
}

std::optional<std::uint32_t> AppSpec::nav_target(Location l, Action a) const {
  if (!is_directional(a)) return std::nullopt;
  const std::int32_t t = nav_[l.screen][l.element][index_of(a)];
  if (t < 0) return std::nullopt;
  return static_cast<std::uint32_t>(t);
}

SimState initial_state(const AppSpec& spec) {
  SimState s;
  s.at = *spec.locate(spec.start_screen(), spec.start_focus());
  return s;
}

StepResult step(const AppSpec& spec, const SimState& state, Action action) {
  StepResult r{state, Effect::Noop};
  if (is_directional(action)) {
    if (auto t = spec.nav_target(state.at, action)) {
      r.state.at.element = *t;
      r.effect = Effect::Moved;
    }
    return r;
  }
  if (action == Action::Ok) {
    const Element& el = spec.element(state.at);
    if (const auto* open = std::get_if<OpenScreen>(&el.ok)) {
      r.state.history.push_back(state.at);
      r.state.at = *spec.locate(open->screen, open->focus);
      r.effect = Effect::Opened;
    } else if (const auto* toggle = std::get_if<InternalToggle>(&el.ok)) {
      bool& flag = r.state.flags[toggle->key];
      flag = !flag;
      r.effect = Effect::Internal;
    }
    return r;
  }
  // BACK
  if (!state.history.empty()) {
    r.state.at = state.history.back();
    r.state.history.pop_back();
    r.effect = Effect::Backed;
    return r;
  }
  const Screen& screen = spec.screen(state.at.screen);
  if (screen.back_target) {
    const std::uint32_t target = *spec.screen_index(*screen.back_target);
    r.state.at = {target, 0};
    r.effect = Effect::Backed;
  }
  return r;
}

SimState replay(const AppSpec& spec, std::span<const Action> actions) {
  SimState s = initial_state(spec);
  for (Action a : actions) s = step(spec, s, a).state;
  return s;
}

// ---------------------------------------------------------------------------
// Document format

namespace {

using json_io::json;

OkBehavior ok_from_json(const json& j, const std::string& path) {
  if (j.is_null()) return NoOk{};
  if (!j.is_object()) throw ParseError(path, "expected an object or null");
  if (j.contains("open")) {
    const json& o = j.at("open");
    return OpenScreen{json_io::require_string(o, "screen", path + "/open"),
                      json_io::require_string(o, "focus", path + "/open")};
  }
  if (j.contains("toggle")) {
    if (!j.at("toggle").is_string()) throw ParseError(path + "/toggle", "expected a string");
    return InternalToggle{j.at("toggle").get<std::string>()};
  }
  throw ParseError(path, "ok behavior must be null, {\"open\":...} or {\"toggle\":...}");
}

json ok_to_json(const OkBehavior& ok) {
  if (const auto* o = std::get_if<OpenScreen>(&ok)) {
    return {{"open", {{"screen", o->screen}, {"focus", o->focus}}}};
  }
  if (const auto* t = std::get_if<InternalToggle>(&ok)) return {{"toggle", t->key}};
  return nullptr;
}

Screen screen_from_json(const json& j, const std::string& path) {
  Screen screen;
  screen.id = json_io::require_string(j, "id", path);
  if (j.contains("back_target") && !j.at("back_target").is_null()) {
    screen.back_target = json_io::require_string(j, "back_target", path);
  }
  const json& elements = json_io::require(j, "elements", path);
  if (!elements.is_array()) throw ParseError(path + "/elements", "expected an array");
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const std::string epath = path + "/elements/" + std::to_string(i);
    const json& ej = elements[i];
    Element el;
    el.id = json_io::require_string(ej, "id", epath);
    el.label = ej.value("label", std::string());
    el.container = ej.value("container", false);
    if (ej.contains("nav")) {
      const json& nav = ej.at("nav");
      if (!nav.is_object()) throw ParseError(epath + "/nav", "expected an object");
      for (auto it = nav.begin(); it != nav.end(); ++it) {
        auto a = parse_action(it.key());
        if (!a || !is_directional(*a)) {
          throw ParseError(epath + "/nav", "'" + it.key() + "' is not a direction");
        }
        if (!it.value().is_string()) throw ParseError(epath + "/nav/" + it.key(), "expected id");
        el.nav_for(*a) = it.value().get<std::string>();
      }
    }
    el.ok = ok_from_json(ej.value("ok", json(nullptr)), epath + "/ok");
    screen.elements.push_back(std::move(el));
  }
  // Lists are wired after elements; explicit nav entries set above win.
  if (j.contains("lists")) {
    const json& lists = j.at("lists");
    if (!lists.is_array()) throw ParseError(path + "/lists", "expected an array of id arrays");
    for (std::size_t i = 0; i < lists.size(); ++i) {
      if (!lists[i].is_array()) throw ParseError(path + "/lists/" + std::to_string(i), "expected ids");
      std::vector<std::string> ids = lists[i].get<std::vector<std::string>>();
      Screen wired = screen;
      try {
        wired = auto_wire_list(std::move(wired), ids);
      } catch (const Error& e) {
        throw ParseError(path + "/lists/" + std::to_string(i), e.what());
      }
      for (std::size_t k = 0; k < screen.elements.size(); ++k) {
        for (Action a : {Action::Left, Action::Right}) {
          if (!screen.elements[k].nav_for(a)) {
            screen.elements[k].nav_for(a) = wired.elements[k].nav_for(a);
          }
        }
      }
    }
  }
  return screen;
}

}  // namespace

AppSpec app_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("/", "app document must be an object");
  const json& screens = json_io::require(j, "screens", "");
  if (!screens.is_array()) throw ParseError("/screens", "expected an array");
  std::vector<Screen> out;
  for (std::size_t i = 0; i < screens.size(); ++i) {
    out.push_back(screen_from_json(screens[i], "/screens/" + std::to_string(i)));
  }
  return AppSpec::create(std::move(out), json_io::require_string(j, "start_screen", ""),
                         json_io::require_string(j, "start_focus", ""));
}

AppSpec load_app(std::istream& in) { return app_from_json(json_io::parse_text(in, "app document")); }

AppSpec load_app_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open app file '" + path + "'");
  return load_app(in);
}

json to_json(const AppSpec& spec) {
  json screens = json::array();
  for (const auto& s : spec.screens()) {
    json elements = json::array();
    for (const auto& e : s.elements) {
      json nav = json::object();
      for (Action a : kDirections) {
        if (e.nav_for(a)) nav[std::string(to_string(a))] = *e.nav_for(a);
      }
      json je = {{"id", e.id}, {"nav", std::move(nav)}, {"ok", ok_to_json(e.ok)}};
      if (!e.label.empty()) je["label"] = e.label;
      if (e.container) je["container"] = true;
      elements.push_back(std::move(je));
    }
    screens.push_back({{"id", s.id},
                       {"back_target", s.back_target ? json(*s.back_target) : json(nullptr)},
                       {"elements", std::move(elements)}});
  }
  return {{"screens", std::move(screens)},
          {"start_screen", spec.start_screen()},
          {"start_focus", spec.start_focus()}};
}

void save_app(const AppSpec& spec, std::ostream& out) { out << to_json(spec).dump(2) << '\n'; }

AppSpec generated_list(std::size_t n) {
  Screen screen;
  screen.id = "list";
  screen.elements.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Element& e = screen.elements[i];
    e.id = "item" + std::to_string(i);
    if (i > 0) e.nav_for(Action::Left) = screen.elements[i - 1].id;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    screen.elements[i].nav_for(Action::Right) = screen.elements[i + 1].id;
  }
  std::string first = n ? screen.elements.front().id : std::string("item0");
  std::vector<Screen> screens;
  screens.push_back(std::move(screen));
  return AppSpec::create(std::move(screens), "list", std::move(first));
}

}  // namespace tvflow::sim
