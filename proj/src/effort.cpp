#include "tvflow/effort.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "csv.hpp"
#include "tvflow/error.hpp"

namespace tvflow {

bool nearly_equal(Effort a, Effort b, double rel) noexcept {
  if (!a.feasible() || !b.feasible()) return a.feasible() == b.feasible();
  const double scale = std::max({1.0, std::abs(a.ms()), std::abs(b.ms())});
  return std::abs(a.ms() - b.ms()) <= rel * scale;
}

void validate_context(const Context& ctx) {
  std::vector<std::string> problems;
  for (Action a : kAllActions) {
    const double d = ctx.delta(a);
    const double uc = ctx.capability(a);
    if (!(d > 0.0) || !std::isfinite(d)) {
      problems.push_back("delta(" + std::string(to_string(a)) + ") must be positive");
    }
    if (!(uc >= 0.0 && uc <= 1.0)) {
      problems.push_back("uc(" + std::string(to_string(a)) + ") must lie in [0, 1]");
    }
  }
  if (!(ctx.device_factor >= 0.0) || !std::isfinite(ctx.device_factor))
    problems.push_back("device factor must be >= 0");
  if (!(ctx.env_factor >= 0.0) || !std::isfinite(ctx.env_factor))
    problems.push_back("environment factor must be >= 0");
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

Effort action_effort(Action a, const Context& ctx) noexcept {
  const double uc = ctx.capability(a);
  if (uc == 0.0 || ctx.device_factor == 0.0 || ctx.env_factor == 0.0) return Effort::infeasible();
  return Effort(ctx.delta(a) / uc / ctx.device_factor / ctx.env_factor);
}

Effort path_effort(std::span<const Edge> edges, const Context& ctx) noexcept {
  Effort total;
  for (const auto& e : edges) total += edge_effort(e, ctx);
  return total;
}

Effort path_effort(std::span<const Action> actions, const Context& ctx) noexcept {
  Effort total;
  for (Action a : actions) total += action_effort(a, ctx);
  return total;
}

Context builtin_context(std::string_view name) {
  Context c;
  c.uc.fill(1.0);
  c.device_factor = 1.0;
  c.env_factor = 1.0;
  if (name == "initial" || name == "baseline-Cs") {
    c.name = std::string(name);
    c.delta_ms = {800, 800, 800, 800, 2500, 1500};
  } else if (name == "adjusted") {
    c.name = "adjusted";
    c.delta_ms = {1000, 1000, 1000, 1250, 2000, 1225};
  } else {
    throw UnknownIdError("unknown context '" + std::string(name) +
                         "' (expected initial, adjusted or baseline-Cs)");
  }
  return c;
}

namespace {

std::string row_where(const char* file, std::size_t line) {
  return std::string(file) + " line " + std::to_string(line);
}

void expect_header(const std::vector<csv::Row>& rows, const char* file,
                   std::initializer_list<std::string_view> names) {
  if (rows.empty()) throw ParseError(file, "missing header");
  const auto& h = rows.front();
  bool ok = h.fields.size() == names.size();
  std::size_t i = 0;
  for (auto n : names) {
    if (!ok) break;
    ok = h.fields[i++] == n;
  }
  if (!ok) {
    std::string expected;
    for (auto n : names) expected += (expected.empty() ? "" : ",") + std::string(n);
    throw ParseError(row_where(file, h.line), "expected header '" + expected + "'");
  }
}

}  // namespace

Context load_context(std::istream& delta_csv, std::istream& factors_csv, std::string name) {
  Context c;
  c.name = std::move(name);

  auto rows = csv::read(delta_csv);
  expect_header(rows, "delta CSV", {"action", "delta_ms", "uc"});
  std::array<bool, kActionCount> seen{};
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const auto where = row_where("delta CSV", r.line);
    if (r.fields.size() != 3) throw ParseError(where, "expected 3 fields");
    auto a = parse_action(r.fields[0]);
    if (!a) throw ParseError(where, "unknown action '" + r.fields[0] + "'");
    if (seen[index_of(*a)]) throw ParseError(where, "duplicate action '" + r.fields[0] + "'");
    auto d = csv::to_double(r.fields[1]);
    auto uc = csv::to_double(r.fields[2]);
    if (!d) throw ParseError(where, "delta_ms is not a number");
    if (!uc) throw ParseError(where, "uc is not a number");
    if (!(*d > 0)) throw ParseError(where, "delta_ms must be positive");
    if (!(*uc >= 0 && *uc <= 1)) throw ParseError(where, "uc out of range [0, 1]");
    seen[index_of(*a)] = true;
    c.delta_ms[index_of(*a)] = *d;
    c.uc[index_of(*a)] = *uc;
  }
  for (Action a : kAllActions) {
    if (!seen[index_of(a)])
      throw ParseError("delta CSV", "missing row for action " + std::string(to_string(a)));
  }

  auto frows = csv::read(factors_csv);
  expect_header(frows, "factors CSV", {"factor", "value"});
  bool have_dev = false, have_env = false;
  for (std::size_t i = 1; i < frows.size(); ++i) {
    const auto& r = frows[i];
    const auto where = row_where("factors CSV", r.line);
    if (r.fields.size() != 2) throw ParseError(where, "expected 2 fields");
    auto v = csv::to_double(r.fields[1]);
    if (!v) throw ParseError(where, "value is not a number");
    if (*v < 0) throw ParseError(where, "factor must be >= 0");
    if (r.fields[0] == "device") {
      c.device_factor = *v;
      have_dev = true;
    } else if (r.fields[0] == "environment") {
      c.env_factor = *v;
      have_env = true;
    } else {
      throw ParseError(where, "unknown factor '" + r.fields[0] + "'");
    }
  }
  if (!have_dev) throw ParseError("factors CSV", "missing 'device' row");
  if (!have_env) throw ParseError("factors CSV", "missing 'environment' row");
  return c;
}

Context load_context_files(const std::string& delta_path, const std::string& factors_path) {
  std::ifstream d(delta_path);
  if (!d) throw Error("cannot open delta CSV '" + delta_path + "'");
  std::ifstream f(factors_path);
  if (!f) throw Error("cannot open factors CSV '" + factors_path + "'");
  return load_context(d, f, std::filesystem::path(delta_path).stem().string());
}

void write_delta_csv(const Context& ctx, std::ostream& out) {
  out << "action,delta_ms,uc\n";
  for (Action a : kAllActions) {
    out << to_string(a) << ',' << csv::format_double(ctx.delta(a)) << ','
        << csv::format_double(ctx.capability(a)) << '\n';
  }
}

void write_factors_csv(const Context& ctx, std::ostream& out) {
  out << "factor,value\n";
  out << "device," << csv::format_double(ctx.device_factor) << '\n';
  out << "environment," << csv::format_double(ctx.env_factor) << '\n';
}

}  // namespace tvflow
