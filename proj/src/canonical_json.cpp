//
// Copyright 2026 The dppca Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "dppca/canonical_json.hpp"

#include <cmath>
#include <cstdio>

#include "dppca/errors.hpp"

namespace dppca {

namespace {

void append_escaped(std::string& out, const std::string& s) {
  out += '"';
  for (const char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

void append_indent(std::string& out, int indent, int depth) {
  if (indent <= 0) return;
  out += '\n';
  out.append(static_cast<std::size_t>(indent * depth), ' ');
}

void write_value(std::string& out, const nlohmann::ordered_json& v, int indent,
                 int depth) {
  using value_t = nlohmann::ordered_json::value_t;
  switch (v.type()) {
    case value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (const auto& [key, val] : v.items()) {
        if (!first) out += ',';
        first = false;
        append_indent(out, indent, depth + 1);
        append_escaped(out, key);
        out += indent > 0 ? ": " : ":";
        write_value(out, val, indent, depth + 1);
      }
      append_indent(out, indent, depth);
      out += '}';
      return;
    }
    case value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto& val : v) {
        if (!first) out += ',';
        first = false;
        append_indent(out, indent, depth + 1);
        write_value(out, val, indent, depth + 1);
      }
      append_indent(out, indent, depth);
      out += ']';
      return;
    }
    case value_t::string:
      append_escaped(out, v.get<std::string>());
      return;
    case value_t::boolean:
      out += v.get<bool>() ? "true" : "false";
      return;
    case value_t::number_integer: {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%lld",
                    static_cast<long long>(v.get<std::int64_t>()));
      out += buf;
      return;
    }
    case value_t::number_unsigned: {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%llu",
                    static_cast<unsigned long long>(v.get<std::uint64_t>()));
      out += buf;
      return;
    }
    case value_t::number_float: {
      const double x = v.get<double>();
      if (!std::isfinite(x)) {
        throw NumericalError("refusing to serialize a non-finite number");
      }
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", x);
      out += buf;
      return;
    }
    case value_t::null:
      out += "null";
      return;
    default:
      throw NumericalError("unsupported JSON value type");
  }
}

}  // namespace

std::string canonical_dump(const nlohmann::ordered_json& value, int indent) {
  std::string out;
  write_value(out, value, indent, 0);
  out += '\n';
  return out;
}

}  // namespace dppca
