#pragma once

// Reader for the subset of TOML used by scenario files: comments, [table] and
// [[array.of.tables]] headers, and `key = value` pairs whose value is a
// string, integer, float or boolean.

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace tunnelswarm::toml {

struct Value {
  std::variant<bool, std::int64_t, double, std::string> data;
  int line = 0;

  bool is_bool() const { return std::holds_alternative<bool>(data); }
  bool is_integer() const { return std::holds_alternative<std::int64_t>(data); }
  bool is_float() const { return std::holds_alternative<double>(data); }
  bool is_string() const { return std::holds_alternative<std::string>(data); }
};

struct Table {
  int line = 0;
  bool implicit = false;  // created by a deeper header, not yet defined
  std::vector<std::pair<std::string, Value>> values;
  std::vector<std::pair<std::string, Table>> tables;
  std::vector<std::pair<std::string, std::vector<Table>>> arrays;

  const Value* value(std::string_view key) const;
  const Table* table(std::string_view key) const;
  const std::vector<Table>* array(std::string_view key) const;
};

/// Throws ParseError on malformed input, including duplicate keys and
/// redefined tables.
Table parse(std::string_view text);

/// Quotes and escapes a string as a TOML basic string.
std::string quote(std::string_view s);

/// Shortest round-tripping decimal form, always containing '.' or 'e'.
std::string format_float(double v);

}  // namespace tunnelswarm::toml
