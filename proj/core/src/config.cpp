// SPDX-License-Identifier: Apache-2.0
#include "offsim/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "offsim/errors.hpp"

namespace offsim::config {

const Value* Table::find(std::string_view key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return &v;
  }
  return nullptr;
}

Value* Table::find(std::string_view key) {
  for (auto& [k, v] : entries_) {
    if (k == key) return &v;
  }
  return nullptr;
}

void Table::set(std::string key, Value value) {
  if (Value* existing = find(key)) {
    *existing = std::move(value);
    return;
  }
  entries_.emplace_back(std::move(key), std::move(value));
}

void Table::erase(std::string_view key) {
  std::erase_if(entries_, [&](const auto& kv) { return kv.first == key; });
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

bool valid_key(std::string_view key) {
  if (key.empty()) return false;
  for (char c : key) {
    if (!is_bare_key_char(c)) return false;
  }
  return true;
}

bool valid_dotted_name(std::string_view name) {
  if (name.empty()) return false;
  std::size_t start = 0;
  while (true) {
    auto dot = name.find('.', start);
    auto part = name.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
    if (!valid_key(part)) return false;
    if (dot == std::string_view::npos) return true;
    start = dot + 1;
  }
}

// Cursor over a single value expression.
class ValueParser {
 public:
  ValueParser(std::string_view text, bool allow_bare, int line)
      : text_(text), allow_bare_(allow_bare), line_(line) {}

  Value parse_all() {
    Value v = parse_one();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing characters '" + std::string(text_.substr(pos_)) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  Value parse_one() {
    skip_space();
    if (pos_ >= text_.size()) fail("missing value");
    char c = text_[pos_];
    if (c == '"') return parse_string();
    if (c == '[') return parse_array();
    return parse_scalar();
  }

  Value parse_string() {
    ++pos_;
    std::string out;
    while (pos_ < text_.size()) {
      char c = text_[pos_++];
      if (c == '"') {
        Value v;
        v.data = std::move(out);
        v.line = line_;
        return v;
      }
      if (c == '\\') {
        if (pos_ >= text_.size()) break;
        char e = text_[pos_++];
        switch (e) {
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          default: fail(std::string("unsupported escape '\\") + e + "'");
        }
        continue;
      }
      if (c == '\n') fail("newline in string");
      out.push_back(c);
    }
    fail("unterminated string");
  }

  Value parse_array() {
    ++pos_;
    Array items;
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == ']') {
      ++pos_;
    } else {
      while (true) {
        items.push_back(parse_one());
        skip_space();
        if (pos_ >= text_.size()) fail("unterminated array");
        char c = text_[pos_++];
        if (c == ']') break;
        if (c != ',') fail("expected ',' or ']' in array");
        skip_space();
        // trailing comma
        if (pos_ < text_.size() && text_[pos_] == ']') {
          ++pos_;
          break;
        }
      }
    }
    Value v;
    v.data = std::move(items);
    v.line = line_;
    return v;
  }

  Value parse_scalar() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ']' &&
           !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    std::string_view tok = text_.substr(start, pos_ - start);
    Value v;
    v.line = line_;
    if (tok == "true" || tok == "false") {
      v.data = (tok == "true");
      return v;
    }
    if (auto num = parse_number(tok)) {
      v.data = num->first;
      v.integer = num->second;
      return v;
    }
    if (allow_bare_ && valid_key(tok)) {
      v.data = std::string(tok);
      return v;
    }
    fail("invalid value '" + std::string(tok) + "'");
  }

  static std::optional<std::pair<double, bool>> parse_number(std::string_view tok) {
    if (tok.empty()) return std::nullopt;
    std::string_view body = tok;
    bool negative = false;
    if (body.front() == '+' || body.front() == '-') {
      negative = body.front() == '-';
      body.remove_prefix(1);
    }
    if (body == "inf") {
      return std::pair{negative ? -std::numeric_limits<double>::infinity()
                                : std::numeric_limits<double>::infinity(),
                       false};
    }
    if (body == "nan") return std::pair{std::numeric_limits<double>::quiet_NaN(), false};
    if (body.empty() || !(std::isdigit(static_cast<unsigned char>(body.front())) || body.front() == '.')) {
      return std::nullopt;
    }
    std::string cleaned;
    cleaned.reserve(body.size());
    for (char c : body) {
      if (c != '_') cleaned.push_back(c);
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(cleaned.data(), cleaned.data() + cleaned.size(), value);
    if (ec != std::errc{} || ptr != cleaned.data() + cleaned.size()) return std::nullopt;
    bool integer = cleaned.find_first_of(".eE") == std::string::npos;
    return std::pair{negative ? -value : value, integer};
  }

  std::string_view text_;
  bool allow_bare_;
  int line_;
  std::size_t pos_ = 0;
};

// Removes a trailing comment, respecting string literals.
std::string_view strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
    } else if (c == '"') {
      in_string = true;
    } else if (c == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

int bracket_balance(std::string_view s) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
    } else if (c == '"') {
      in_string = true;
    } else if (c == '[') {
      ++depth;
    } else if (c == ']') {
      --depth;
    }
  }
  return depth;
}

}  // namespace

Value parse_value(std::string_view text, bool allow_bare, int line) {
  return ValueParser(text, allow_bare, line).parse_all();
}

Document parse(std::string_view text) {
  Document doc;
  Table* current = &doc.root;

  std::vector<std::string_view> lines;
  {
    std::size_t start = 0;
    while (start <= text.size()) {
      auto nl = text.find('\n', start);
      if (nl == std::string_view::npos) {
        lines.push_back(text.substr(start));
        break;
      }
      lines.push_back(text.substr(start, nl - start));
      start = nl + 1;
    }
  }

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int lineno = static_cast<int>(i) + 1;
    std::string_view line = trim(strip_comment(lines[i]));
    if (line.empty()) continue;

    if (line.starts_with("[[")) {
      if (!line.ends_with("]]")) throw ParseError("malformed array-of-tables header", lineno);
      std::string_view name = trim(line.substr(2, line.size() - 4));
      if (!valid_dotted_name(name)) throw ParseError("invalid table name '" + std::string(name) + "'", lineno);
      if (doc.tables.contains(name)) {
        throw ParseError("'" + std::string(name) + "' already defined as a table", lineno);
      }
      auto& arr = doc.table_arrays[std::string(name)];
      arr.emplace_back();
      arr.back().line = lineno;
      current = &arr.back();
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("malformed table header", lineno);
      std::string_view name = trim(line.substr(1, line.size() - 2));
      if (!valid_dotted_name(name)) throw ParseError("invalid table name '" + std::string(name) + "'", lineno);
      if (doc.tables.contains(name) || doc.table_arrays.contains(name)) {
        throw ParseError("duplicate table '" + std::string(name) + "'", lineno);
      }
      auto [it, _] = doc.tables.emplace(std::string(name), Table{});
      it->second.line = lineno;
      current = &it->second;
      continue;
    }

    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", lineno);
    std::string_view key = trim(line.substr(0, eq));
    if (!valid_key(key)) throw ParseError("invalid key '" + std::string(key) + "'", lineno);
    if (current->contains(key)) throw ParseError("duplicate key '" + std::string(key) + "'", lineno);

    std::string rhs(trim(line.substr(eq + 1)));
    int depth = bracket_balance(rhs);
    while (depth > 0) {
      if (++i >= lines.size()) throw ParseError("unterminated array", lineno);
      std::string_view cont = trim(strip_comment(lines[i]));
      rhs.push_back(' ');
      rhs.append(cont);
      depth = bracket_balance(rhs);
    }
    current->set(std::string(key), parse_value(rhs, false, lineno));
  }
  return doc;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::string s = fmt::format("{}", v);
  // Keep floats recognisable as floats (1 -> 1.0) so integer-ness survives
  // a round trip.
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

std::string format_value(const Value& v) {
  return std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, double>) {
          if (v.integer && std::isfinite(x) && std::abs(x) < 9.0e15) return fmt::format("{}", static_cast<long long>(x));
          return format_number(x);
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          std::string out = "\"";
          for (char c : x) {
            switch (c) {
              case '"': out += "\\\""; break;
              case '\\': out += "\\\\"; break;
              case '\n': out += "\\n"; break;
              case '\t': out += "\\t"; break;
              default: out.push_back(c);
            }
          }
          out.push_back('"');
          return out;
        } else {
          std::string out = "[";
          for (std::size_t i = 0; i < x.size(); ++i) {
            if (i) out += ", ";
            out += format_value(x[i]);
          }
          out.push_back(']');
          return out;
        }
      },
      v.data);
}

}  // namespace offsim::config
