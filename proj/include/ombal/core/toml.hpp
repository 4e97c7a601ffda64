// Copyright 2026 The ombal Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Minimal reader/writer for the TOML subset used by run configurations:
// bare keys, [table.path] and [[array.of.tables]] headers, strings, integers,
// floats, booleans and (nested) arrays. Inline tables and dotted keys are
// rejected as parse errors.

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ombal::toml {

struct Value;
using Array = std::vector<Value>;
using Table = std::map<std::string, Value, std::less<>>;

struct Value {
  using Storage = std::variant<bool, std::int64_t, double, std::string, Array, Table>;
  Storage data;
  std::size_t line = 0;

  bool is_table() const { return std::holds_alternative<Table>(data); }
  bool is_array() const { return std::holds_alternative<Array>(data); }
  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_integer() const { return std::holds_alternative<std::int64_t>(data); }
  bool is_float() const { return std::holds_alternative<double>(data); }
  bool is_bool() const { return std::holds_alternative<bool>(data); }
  bool is_number() const { return is_integer() || is_float(); }

  const char* type_name() const;
};

// Throws ParseError with the offending line number.
Table parse(std::string_view text);

// Formats a double so that parse() reads back the identical value.
std::string format_float(double v);
std::string quote(std::string_view s);

}  // namespace ombal::toml
