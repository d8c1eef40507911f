#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ambit::io {

class TomlError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Minimal TOML document tree. Supported subset: [section.path] tables,
/// [[array.of.tables]], bare keys, strings, numbers (with inf/nan and
/// underscores), booleans, flat arrays of numbers or strings, # comments.
struct TomlValue {
  enum class Kind { None, String, Number, Boolean, Array, Table, TableArray };
  Kind kind = Kind::None;
  std::string str;
  double num = 0.0;
  bool boolean = false;
  std::vector<TomlValue> array;  // Array elements or TableArray tables
  std::map<std::string, TomlValue> table;

  bool is_table() const { return kind == Kind::Table; }
  bool has(const std::string& key) const {
    return kind == Kind::Table && table.count(key) > 0;
  }
  const TomlValue& at(const std::string& key) const;

  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  std::string string(const std::string& key) const;
  std::string string_or(const std::string& key, std::string fallback) const;
  bool boolean_or(const std::string& key, bool fallback) const;
  std::vector<double> numbers(const std::string& key) const;
};

TomlValue parse_toml(std::string_view text);
TomlValue parse_toml_file(const std::string& path);

}  // namespace ambit::io
