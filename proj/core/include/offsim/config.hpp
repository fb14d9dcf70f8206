// SPDX-License-Identifier: Apache-2.0
#pragma once

// Reader/writer for the small TOML subset used by profile files: [table],
// [[array-of-tables]], `key = value` with numbers, booleans, strings and
// (possibly multi-line) arrays, `#` comments.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace offsim::config {

struct Value;
using Array = std::vector<Value>;

struct Value {
  std::variant<double, bool, std::string, Array> data;
  bool integer = false;  // written without fraction/exponent
  int line = 0;

  bool is_number() const { return std::holds_alternative<double>(data); }
  bool is_bool() const { return std::holds_alternative<bool>(data); }
  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_array() const { return std::holds_alternative<Array>(data); }

  double as_number() const { return std::get<double>(data); }
  bool as_bool() const { return std::get<bool>(data); }
  const std::string& as_string() const { return std::get<std::string>(data); }
  const Array& as_array() const { return std::get<Array>(data); }
};

/// Insertion-ordered key/value table.
class Table {
 public:
  int line = 0;

  const Value* find(std::string_view key) const;
  Value* find(std::string_view key);
  /// Inserts or replaces.
  void set(std::string key, Value value);
  bool contains(std::string_view key) const { return find(key) != nullptr; }
  void erase(std::string_view key);

  const std::vector<std::pair<std::string, Value>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, Value>> entries_;
};

struct Document {
  Table root;
  std::map<std::string, Table, std::less<>> tables;
  std::map<std::string, std::vector<Table>, std::less<>> table_arrays;
};

/// Throws ParseError with the offending line.
Document parse(std::string_view text);

/// Parses a single value as it would appear to the right of `=`. With
/// `allow_bare`, an unquoted word that is not a number or boolean is taken
/// as a string (convenient for command-line overrides).
Value parse_value(std::string_view text, bool allow_bare = false, int line = 0);

/// Shortest decimal text that reads back to exactly `v`; `inf`, `-inf`, `nan`
/// for non-finite values.
std::string format_number(double v);

std::string format_value(const Value& v);

}  // namespace offsim::config
