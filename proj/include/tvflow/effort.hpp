#pragma once

#include <array>
#include <compare>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <string_view>

#include "tvflow/action.hpp"
#include "tvflow/interaction_model.hpp"

namespace tvflow {

/// User effort in milliseconds, or INFEASIBLE. INFEASIBLE absorbs addition
/// and orders above every finite value.
class Effort {
 public:
  constexpr Effort() = default;
  constexpr explicit Effort(double ms) : ms_(ms) {}

  static constexpr Effort infeasible() { return Effort(kInf); }

  constexpr bool feasible() const noexcept { return ms_ != kInf; }
  /// Milliseconds; +infinity when infeasible.
  constexpr double ms() const noexcept { return ms_; }

  constexpr Effort& operator+=(Effort o) noexcept {
    ms_ = (feasible() && o.feasible()) ? ms_ + o.ms_ : kInf;
    return *this;
  }
  friend constexpr Effort operator+(Effort a, Effort b) noexcept { return a += b; }
  friend constexpr auto operator<=>(Effort a, Effort b) noexcept { return a.ms_ <=> b.ms_; }
  friend constexpr bool operator==(Effort a, Effort b) noexcept { return a.ms_ == b.ms_; }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();
  double ms_ = 0.0;
};

/// Equality at 1e-9 relative tolerance; INFEASIBLE equals only itself.
bool nearly_equal(Effort a, Effort b, double rel = 1e-9) noexcept;

/// User/device/environment parametrization of the effort formula.
struct Context {
  std::string name;
  std::array<double, kActionCount> delta_ms{};  // default effort per action
  std::array<double, kActionCount> uc{};        // user capability in [0, 1]
  double device_factor = 1.0;
  double env_factor = 1.0;

  double delta(Action a) const { return delta_ms[index_of(a)]; }
  double capability(Action a) const { return uc[index_of(a)]; }

  friend bool operator==(const Context&, const Context&) = default;
};

/// Throws ValidationError when delta <= 0, uc outside [0,1], or a negative factor.
void validate_context(const Context& ctx);

/// delta * 1/UC * 1/device * 1/env; INFEASIBLE when any divisor is zero.
Effort action_effort(Action a, const Context& ctx) noexcept;
inline Effort edge_effort(const Edge& e, const Context& ctx) noexcept {
  return action_effort(e.action, ctx);
}

Effort path_effort(std::span<const Edge> edges, const Context& ctx) noexcept;
Effort path_effort(std::span<const Action> actions, const Context& ctx) noexcept;

/// "initial" (alias "baseline-Cs") or "adjusted". Throws UnknownIdError otherwise.
Context builtin_context(std::string_view name);

/// delta CSV: `action,delta_ms,uc` with all six actions; factors CSV:
/// `factor,value` with `device` and `environment` rows.
Context load_context(std::istream& delta_csv, std::istream& factors_csv,
                     std::string name = "custom");
Context load_context_files(const std::string& delta_path, const std::string& factors_path);

void write_delta_csv(const Context& ctx, std::ostream& out);
void write_factors_csv(const Context& ctx, std::ostream& out);

}  // namespace tvflow
