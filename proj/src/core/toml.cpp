// Copyright 2026 The ombal Authors
// SPDX-License-Identifier: Apache-2.0

#include "ombal/core/toml.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

#include "ombal/error.hpp"

namespace ombal::toml {

const char* Value::type_name() const {
  switch (data.index()) {
    case 0: return "boolean";
    case 1: return "integer";
    case 2: return "float";
    case 3: return "string";
    case 4: return "array";
    default: return "table";
  }
}

namespace {

bool is_bare_key_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' ||
         c == '-';
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Table run() {
    Table root;
    Table* current = &root;
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        current = &header(root);
      } else {
        key_value(*current);
      }
      end_of_line();
    }
    return root;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;

  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return eof() ? '\0' : text_[pos_]; }
  char get() {
    char c = text_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_); }

  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }
  void skip_comment() {
    if (peek() == '#')
      while (!eof() && peek() != '\n') ++pos_;
  }
  void skip_blank_lines() {
    while (!eof()) {
      skip_ws();
      skip_comment();
      if (peek() == '\r') ++pos_;
      if (peek() == '\n') {
        get();
        continue;
      }
      break;
    }
  }
  // Whitespace, comments and newlines inside arrays.
  void skip_array_space() {
    while (!eof()) {
      skip_ws();
      skip_comment();
      if (peek() == '\r' || peek() == '\n') {
        get();
        continue;
      }
      break;
    }
  }
  void end_of_line() {
    skip_ws();
    skip_comment();
    if (peek() == '\r') ++pos_;
    if (eof()) return;
    if (peek() != '\n') fail(std::string("unexpected character '") + peek() + "'");
    get();
  }

  std::string key() {
    skip_ws();
    if (peek() == '"') return basic_string();
    std::size_t start = pos_;
    while (!eof() && is_bare_key_char(peek())) ++pos_;
    if (start == pos_) fail("expected a key");
    return std::string(text_.substr(start, pos_ - start));
  }

  Table& header(Table& root) {
    get();  // '['
    bool array_of_tables = false;
    if (peek() == '[') {
      get();
      array_of_tables = true;
    }
    std::vector<std::string> path;
    while (true) {
      path.push_back(key());
      skip_ws();
      if (peek() == '.') {
        get();
        continue;
      }
      break;
    }
    if (get() != ']') fail("expected ']' to close table header");
    if (array_of_tables && get() != ']') fail("expected ']]' to close array-of-tables header");

    Table* t = &root;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) t = &descend(*t, path[i]);
    const std::string& last = path.back();
    if (array_of_tables) {
      auto [it, inserted] = t->try_emplace(last, Value{Array{}, line_});
      if (!it->second.is_array()) fail("'" + last + "' is not an array of tables");
      auto& arr = std::get<Array>(it->second.data);
      arr.push_back(Value{Table{}, line_});
      return std::get<Table>(arr.back().data);
    }
    auto it = t->find(last);
    if (it != t->end()) {
      if (!it->second.is_table()) fail("'" + last + "' redefined as a table");
      return std::get<Table>(it->second.data);
    }
    return std::get<Table>(t->emplace(last, Value{Table{}, line_}).first->second.data);
  }

  // Intermediate table on a header path; the last element of an array of
  // tables when the segment names one.
  Table& descend(Table& t, const std::string& k) {
    auto [it, inserted] = t.try_emplace(k, Value{Table{}, line_});
    if (it->second.is_table()) return std::get<Table>(it->second.data);
    if (it->second.is_array()) {
      auto& arr = std::get<Array>(it->second.data);
      if (!arr.empty() && arr.back().is_table()) return std::get<Table>(arr.back().data);
    }
    fail("'" + k + "' is not a table");
  }

  void key_value(Table& t) {
    const std::size_t key_line = line_;
    std::string k = key();
    skip_ws();
    if (peek() == '.') fail("dotted keys are not supported");
    if (peek() != '=') fail("expected '=' after key '" + k + "'");
    get();
    skip_ws();
    Value v = value();
    v.line = key_line;
    if (!t.emplace(k, std::move(v)).second) throw ParseError("duplicate key '" + k + "'", key_line);
  }

  Value value() {
    const std::size_t l = line_;
    char c = peek();
    if (c == '"') return Value{basic_string(), l};
    if (c == '\'') return Value{literal_string(), l};
    if (c == '[') return Value{array(), l};
    if (c == '{') fail("inline tables are not supported");
    if (text_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return Value{true, l};
    }
    if (text_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return Value{false, l};
    }
    return number();
  }

  Array array() {
    get();  // '['
    Array out;
    while (true) {
      skip_array_space();
      if (peek() == ']') {
        get();
        return out;
      }
      if (eof()) fail("unterminated array");
      out.push_back(value());
      skip_array_space();
      if (peek() == ',') {
        get();
        continue;
      }
      if (peek() == ']') {
        get();
        return out;
      }
      fail("expected ',' or ']' in array");
    }
  }

  std::string basic_string() {
    get();  // '"'
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      char c = get();
      if (c == '"') return out;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (eof()) fail("unterminated escape");
      char e = get();
      switch (e) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        default: fail(std::string("unsupported escape '\\") + e + "'");
      }
    }
  }

  std::string literal_string() {
    get();
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      char c = get();
      if (c == '\'') return out;
      out.push_back(c);
    }
  }

  Value number() {
    const std::size_t l = line_;
    std::size_t start = pos_;
    while (!eof()) {
      char c = peek();
      if ((c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.' || c == 'e' || c == 'E' ||
          c == '_' || (c >= 'a' && c <= 'z')) {
        ++pos_;
      } else {
        break;
      }
    }
    std::string tok;
    for (char c : text_.substr(start, pos_ - start))
      if (c != '_') tok.push_back(c);
    if (tok.empty()) fail("expected a value");

    std::string_view body = tok;
    bool negative = false;
    if (body.front() == '+' || body.front() == '-') {
      negative = body.front() == '-';
      body.remove_prefix(1);
    }
    if (body == "inf") return Value{negative ? -std::numeric_limits<double>::infinity()
                                             : std::numeric_limits<double>::infinity(), l};
    if (body == "nan") return Value{std::numeric_limits<double>::quiet_NaN(), l};

    const bool is_float = tok.find_first_of(".eE") != std::string::npos;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    if (*first == '+') ++first;
    if (is_float) {
      double d = 0.0;
      auto [ptr, ec] = std::from_chars(first, last, d);
      if (ec != std::errc() || ptr != last) fail("invalid float '" + tok + "'");
      return Value{d, l};
    }
    std::int64_t i = 0;
    auto [ptr, ec] = std::from_chars(first, last, i);
    if (ec != std::errc() || ptr != last) fail("invalid value '" + tok + "'");
    return Value{i, l};
  }
};

}  // namespace

Table parse(std::string_view text) { return Parser(text).run(); }

std::string format_float(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

}  // namespace ombal::toml
