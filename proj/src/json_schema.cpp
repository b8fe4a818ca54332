#include "scholarlink/json_schema.hpp"

#include <vector>

namespace scholarlink::json_schema {

namespace {

using nlohmann::json;

std::string type_name(const json& v) {
    switch (v.type()) {
        case json::value_t::null: return "null";
        case json::value_t::boolean: return "boolean";
        case json::value_t::string: return "string";
        case json::value_t::array: return "array";
        case json::value_t::object: return "object";
        case json::value_t::number_integer:
        case json::value_t::number_unsigned: return "integer";
        case json::value_t::number_float: return "number";
        default: return "unknown";
    }
}

bool type_matches(const std::string& want, const json& v) {
    if (want == "number") return v.is_number();
    if (want == "integer") return v.is_number_integer() || v.is_number_unsigned();
    return type_name(v) == want;
}

std::optional<std::string> check(const json& schema, const json& value, const std::string& path) {
    if (!schema.is_object()) return std::nullopt;  // permissive empty schema

    if (auto it = schema.find("type"); it != schema.end()) {
        bool ok = false;
        if (it->is_array()) {
            for (const auto& t : *it) ok = ok || type_matches(t.get<std::string>(), value);
        } else {
            ok = type_matches(it->get<std::string>(), value);
        }
        if (!ok) {
            return path + ": expected type " + it->dump() + ", got " + type_name(value);
        }
    }

    if (auto it = schema.find("enum"); it != schema.end()) {
        bool ok = false;
        for (const auto& v : *it) ok = ok || v == value;
        if (!ok) return path + ": value " + value.dump() + " not in enum " + it->dump();
    }

    if (value.is_object()) {
        if (auto it = schema.find("required"); it != schema.end()) {
            for (const auto& key : *it) {
                auto k = key.get<std::string>();
                if (!value.contains(k)) return path + ": missing required key \"" + k + "\"";
            }
        }
        if (auto it = schema.find("properties"); it != schema.end()) {
            for (auto& [key, sub] : it->items()) {
                if (!value.contains(key)) continue;
                if (auto err = check(sub, value.at(key), path + "." + key)) return err;
            }
        }
    }

    if (value.is_array()) {
        if (auto it = schema.find("minItems"); it != schema.end()) {
            if (value.size() < it->get<size_t>())
                return path + ": expected at least " + std::to_string(it->get<size_t>()) +
                       " items, got " + std::to_string(value.size());
        }
        if (auto it = schema.find("maxItems"); it != schema.end()) {
            if (value.size() > it->get<size_t>())
                return path + ": expected at most " + std::to_string(it->get<size_t>()) +
                       " items, got " + std::to_string(value.size());
        }
        if (auto it = schema.find("items"); it != schema.end()) {
            for (size_t i = 0; i < value.size(); ++i) {
                if (auto err = check(*it, value[i], path + "[" + std::to_string(i) + "]"))
                    return err;
            }
        }
    }

    if (value.is_string()) {
        if (auto it = schema.find("minLength"); it != schema.end()) {
            if (value.get<std::string>().size() < it->get<size_t>())
                return path + ": string shorter than minLength " +
                       std::to_string(it->get<size_t>());
        }
    }

    return std::nullopt;
}

}  // namespace

std::optional<std::string> validate(const nlohmann::json& schema, const nlohmann::json& value) {
    return check(schema, value, "$");
}

}  // namespace scholarlink::json_schema
