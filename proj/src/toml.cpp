#include "ambit/toml.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ambit::io {

namespace {

[[noreturn]] void fail(int line, const std::string& what) {
  throw TomlError("toml parse error (line " + std::to_string(line) + "): " + what);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

// Strips a trailing comment that is not inside a quoted string.
std::string_view strip_comment(std::string_view s) {
  bool in_str = false;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) in_str = !in_str;
    if (s[i] == '#' && !in_str) return s.substr(0, i);
  }
  return s;
}

std::vector<std::string> split_path(std::string_view s, int line) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == '.') {
      if (cur.empty()) fail(line, "empty path segment");
      parts.push_back(cur);
      cur.clear();
    } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
      cur += c;
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      fail(line, std::string("unexpected character '") + c + "' in table name");
    }
  }
  if (cur.empty()) fail(line, "empty path segment");
  parts.push_back(cur);
  return parts;
}

std::string parse_basic_string(std::string_view s, int line) {
  if (s.size() < 2 || s.front() != '"' || s.back() != '"') {
    fail(line, "malformed string value");
  }
  std::string out;
  for (size_t i = 1; i + 1 < s.size(); ++i) {
    char c = s[i];
    if (c == '\\' && i + 2 < s.size()) {
      ++i;
      switch (s[i]) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default: fail(line, "unsupported escape sequence");
      }
    } else {
      out += c;
    }
  }
  return out;
}

bool parse_number(std::string_view s, double& out) {
  std::string cleaned;
  for (char c : s) {
    if (c != '_') cleaned += c;
  }
  if (cleaned.empty()) return false;
  const char* begin = cleaned.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end != nullptr && *end == '\0' && end != begin;
}

std::vector<std::string_view> split_top_level(std::string_view s, int line) {
  std::vector<std::string_view> out;
  bool in_str = false;
  size_t start = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) in_str = !in_str;
    if (s[i] == ',' && !in_str) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  if (in_str) fail(line, "unterminated string in array");
  const auto last = trim(s.substr(start));
  if (!last.empty()) out.push_back(s.substr(start));
  return out;
}

TomlValue parse_value(std::string_view raw, int line) {
  const auto s = trim(raw);
  TomlValue v;
  if (s.empty()) fail(line, "missing value");
  if (s.front() == '"') {
    v.kind = TomlValue::Kind::String;
    v.str = parse_basic_string(s, line);
    return v;
  }
  if (s == "true" || s == "false") {
    v.kind = TomlValue::Kind::Boolean;
    v.boolean = (s == "true");
    return v;
  }
  if (s.front() == '[') {
    if (s.back() != ']') fail(line, "unterminated array");
    v.kind = TomlValue::Kind::Array;
    for (const auto part : split_top_level(s.substr(1, s.size() - 2), line)) {
      if (!trim(part).empty()) v.array.push_back(parse_value(part, line));
    }
    return v;
  }
  double num = 0.0;
  if (parse_number(s, num)) {
    v.kind = TomlValue::Kind::Number;
    v.num = num;
    return v;
  }
  fail(line, "unrecognised value '" + std::string(s) + "'");
}

TomlValue* descend(TomlValue* root, const std::vector<std::string>& path,
                   int line, bool as_array) {
  TomlValue* cur = root;
  for (size_t i = 0; i < path.size(); ++i) {
    const bool last = (i + 1 == path.size());
    auto& slot = cur->table[path[i]];
    if (slot.kind == TomlValue::Kind::None) {
      slot.kind = (last && as_array) ? TomlValue::Kind::TableArray
                                     : TomlValue::Kind::Table;
    }
    if (last && as_array) {
      if (slot.kind != TomlValue::Kind::TableArray) {
        fail(line, "table redeclared as array of tables");
      }
      TomlValue element;
      element.kind = TomlValue::Kind::Table;
      slot.array.push_back(std::move(element));
      return &slot.array.back();
    }
    if (slot.kind == TomlValue::Kind::TableArray) {
      if (slot.array.empty()) fail(line, "dotted access into empty table array");
      cur = &slot.array.back();
    } else if (slot.kind == TomlValue::Kind::Table) {
      cur = &slot;
    } else {
      fail(line, "key '" + path[i] + "' is not a table");
    }
  }
  return cur;
}

}  // namespace

const TomlValue& TomlValue::at(const std::string& key) const {
  const auto it = table.find(key);
  if (it == table.end()) throw TomlError("missing key '" + key + "'");
  return it->second;
}

double TomlValue::number(const std::string& key) const {
  const auto& v = at(key);
  if (v.kind != Kind::Number) throw TomlError("key '" + key + "' is not a number");
  return v.num;
}

double TomlValue::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

std::string TomlValue::string(const std::string& key) const {
  const auto& v = at(key);
  if (v.kind != Kind::String) throw TomlError("key '" + key + "' is not a string");
  return v.str;
}

std::string TomlValue::string_or(const std::string& key,
                                 std::string fallback) const {
  return has(key) ? string(key) : std::move(fallback);
}

bool TomlValue::boolean_or(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const auto& v = at(key);
  if (v.kind != Kind::Boolean) throw TomlError("key '" + key + "' is not a boolean");
  return v.boolean;
}

std::vector<double> TomlValue::numbers(const std::string& key) const {
  const auto& v = at(key);
  if (v.kind == Kind::Number) return {v.num};
  if (v.kind != Kind::Array) throw TomlError("key '" + key + "' is not an array");
  std::vector<double> out;
  for (const auto& e : v.array) {
    if (e.kind != Kind::Number) {
      throw TomlError("array under '" + key + "' holds a non-number");
    }
    out.push_back(e.num);
  }
  return out;
}

TomlValue parse_toml(std::string_view text) {
  TomlValue root;
  root.kind = TomlValue::Kind::Table;
  TomlValue* current = &root;

  int line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t nl = text.find('\n', pos);
    const std::string_view raw_line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos
                                                      : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;

    const auto line = trim(strip_comment(raw_line));
    if (line.empty()) continue;

    if (line.front() == '[') {
      const bool is_array = line.size() > 1 && line[1] == '[';
      const size_t close = line.find(is_array ? "]]" : "]");
      if (close == std::string_view::npos) fail(line_no, "unterminated table header");
      const auto inside = trim(line.substr(is_array ? 2 : 1, close - (is_array ? 2 : 1)));
      current = descend(&root, split_path(inside, line_no), line_no, is_array);
      continue;
    }

    const size_t eq = [&] {
      bool in_str = false;
      for (size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_str = !in_str;
        if (line[i] == '=' && !in_str) return i;
      }
      return std::string_view::npos;
    }();
    if (eq == std::string_view::npos) fail(line_no, "expected key = value");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) fail(line_no, "empty key");
    for (char c : key) {
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) {
        fail(line_no, "unsupported key syntax '" + std::string(key) + "'");
      }
    }
    current->table[std::string(key)] = parse_value(line.substr(eq + 1), line_no);
  }
  return root;
}

TomlValue parse_toml_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TomlError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_toml(buf.str());
}

}  // namespace ambit::io
