#pragma once

// nlohmann/json conversions for the document types. Kept out of the domain
// headers so only I/O-facing translation units pull in json.hpp.

#include <json.hpp>

#include "tvflow/effort.hpp"
#include "tvflow/interaction_model.hpp"
#include "tvflow/scenario.hpp"

namespace tvflow::json_io {

using nlohmann::json;

json to_json(const InteractionModel& model);
/// Throws ParseError naming the offending JSON path.
ModelDocument model_document_from_json(const json& j);

/// Same shapes as load_scenarios.
std::vector<Scenario> scenarios_from_json(const json& j);
json to_json(const std::vector<Scenario>& scenarios);

/// {"name", "delta_ms": {"LEFT": ...}, "uc": {...}, "device_factor", "env_factor"}.
json to_json(const Context& ctx);
/// Accepts a builtin name (string or {"name"}), {"delta_csv", "factors_csv"}
/// CSV texts, or the object written by to_json (uc and factors default to 1).
/// The result is validated.
Context context_from_json(const json& j);

/// Parses text, converting nlohmann parse failures into ParseError with line/column.
json parse_text(std::istream& in, std::string_view what);

/// Accessor helpers that raise ParseError with a path on type mismatch.
const json& require(const json& obj, const char* key, const std::string& path);
std::string require_string(const json& obj, const char* key, const std::string& path);
double require_number(const json& obj, const char* key, const std::string& path);

}  // namespace tvflow::json_io
