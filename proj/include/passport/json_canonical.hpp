#pragma once

// Canonical JSON serialization: keys sorted, doubles rendered with 6
// significant digits through format_double. Identical inputs therefore
// serialize to identical bytes, which is what the determinism tests compare.

#include <string>
#include <vector>

#include <json.hpp>

#include "passport/common.hpp"

namespace passport {

inline void json_escape_to(std::string& out, const std::string& s) {
  out.push_back('"');
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out.push_back(static_cast<char>(c));
        }
    }
  }
  out.push_back('"');
}

namespace detail {

inline void canonical_dump_to(const nlohmann::json& j, std::string& out,
                              int indent, int depth) {
  const bool pretty = indent >= 0;
  auto newline = [&](int d) {
    if (!pretty) return;
    out.push_back('\n');
    out.append(static_cast<std::size_t>(indent) * d, ' ');
  };

  switch (j.type()) {
    case nlohmann::json::value_t::null:
      out += "null";
      break;
    case nlohmann::json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      break;
    case nlohmann::json::value_t::number_integer:
      out += std::to_string(j.get<std::int64_t>());
      break;
    case nlohmann::json::value_t::number_unsigned:
      out += std::to_string(j.get<std::uint64_t>());
      break;
    case nlohmann::json::value_t::number_float:
      out += format_double(j.get<double>());
      break;
    case nlohmann::json::value_t::string:
      json_escape_to(out, j.get<std::string>());
      break;
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        break;
      }
      out.push_back('[');
      bool first = true;
      for (const auto& item : j) {
        if (!first) out.push_back(',');
        first = false;
        newline(depth + 1);
        canonical_dump_to(item, out, indent, depth + 1);
      }
      newline(depth);
      out.push_back(']');
      break;
    }
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        break;
      }
      std::vector<std::string> keys;
      keys.reserve(j.size());
      for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
      std::sort(keys.begin(), keys.end());
      out.push_back('{');
      bool first = true;
      for (const auto& key : keys) {
        if (!first) out.push_back(',');
        first = false;
        newline(depth + 1);
        json_escape_to(out, key);
        out.push_back(':');
        if (pretty) out.push_back(' ');
        canonical_dump_to(j.at(key), out, indent, depth + 1);
      }
      newline(depth);
      out.push_back('}');
      break;
    }
    default:
      throw ValidationError("unsupported JSON value type");
  }
}

}  // namespace detail

// indent < 0 emits a single line; indent >= 0 pretty-prints.
inline std::string canonical_dump(const nlohmann::json& j, int indent = -1) {
  std::string out;
  detail::canonical_dump_to(j, out, indent, 0);
  return out;
}

}  // namespace passport
