#pragma once

// Minimal JSON-Schema-subset checker for the bundled report schema: handles
// type, required, properties, items and local $ref. Returns the first
// violation as "<path>: <reason>", or an empty string when the instance
// conforms.

#include <string>

#include <json.hpp>

namespace test_support {

inline std::string check_schema(const nlohmann::json& schema,
                                const nlohmann::json& instance,
                                const nlohmann::json& root,
                                const std::string& path = "$") {
  using nlohmann::json;

  if (schema.contains("$ref")) {
    const std::string ref = schema.at("$ref").get<std::string>();
    if (ref.rfind("#/", 0) != 0) return path + ": unsupported $ref " + ref;
    json node = root;
    std::string rest = ref.substr(2);
    while (!rest.empty()) {
      const auto slash = rest.find('/');
      const std::string key = rest.substr(0, slash);
      if (!node.contains(key)) return path + ": dangling $ref " + ref;
      node = node.at(key);
      rest = slash == std::string::npos ? "" : rest.substr(slash + 1);
    }
    return check_schema(node, instance, root, path);
  }

  if (schema.contains("type")) {
    const std::string type = schema.at("type").get<std::string>();
    const bool ok =
        (type == "object" && instance.is_object()) ||
        (type == "array" && instance.is_array()) ||
        (type == "string" && instance.is_string()) ||
        (type == "number" && instance.is_number()) ||
        (type == "integer" && instance.is_number_integer()) ||
        (type == "boolean" && instance.is_boolean()) ||
        (type == "null" && instance.is_null());
    if (!ok) return path + ": expected " + type + ", got " + instance.type_name();
  }

  if (schema.contains("required")) {
    for (const auto& key : schema.at("required")) {
      if (!instance.contains(key.get<std::string>()))
        return path + ": missing required key \"" + key.get<std::string>() + "\"";
    }
  }

  if (schema.contains("properties") && instance.is_object()) {
    for (auto it = schema.at("properties").begin(); it != schema.at("properties").end(); ++it) {
      if (!instance.contains(it.key())) continue;
      const auto error =
          check_schema(it.value(), instance.at(it.key()), root, path + "." + it.key());
      if (!error.empty()) return error;
    }
  }

  if (schema.contains("items") && instance.is_array()) {
    std::size_t index = 0;
    for (const auto& element : instance) {
      const auto error = check_schema(schema.at("items"), element, root,
                                      path + "[" + std::to_string(index) + "]");
      if (!error.empty()) return error;
      ++index;
    }
  }

  return "";
}

}  // namespace test_support
