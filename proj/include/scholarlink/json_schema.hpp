#pragma once

#include <optional>
#include <string>

#include <json.hpp>

namespace scholarlink::json_schema {

/// Validates `value` against a JSON Schema subset: type (incl. lists of
/// types), properties, required, items, enum, minItems, maxItems, minLength.
/// Returns the first violation as "<path>: <message>", or nullopt when valid.
std::optional<std::string> validate(const nlohmann::json& schema, const nlohmann::json& value);

}  // namespace scholarlink::json_schema
