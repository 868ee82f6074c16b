#include "tunnelswarm/toml_lite.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "tunnelswarm/errors.hpp"

namespace tunnelswarm::toml {

const Value* Table::value(std::string_view key) const {
  for (const auto& [k, v] : values) {
    if (k == key) return &v;
  }
  return nullptr;
}

const Table* Table::table(std::string_view key) const {
  for (const auto& [k, t] : tables) {
    if (k == key) return &t;
  }
  return nullptr;
}

const std::vector<Table>* Table::array(std::string_view key) const {
  for (const auto& [k, a] : arrays) {
    if (k == key) return &a;
  }
  return nullptr;
}

namespace {

bool is_bare_key_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
         c == '_' || c == '-';
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Table run() {
    Table root;
    root.line = 1;
    Table* current = &root;
    while (pos_ < text_.size()) {
      skip_blank();
      if (at_end()) break;
      const char c = text_[pos_];
      if (c == '\n') {
        advance_line();
        continue;
      }
      if (c == '#') {
        skip_comment();
        continue;
      }
      if (c == '[') {
        current = header(root);
      } else {
        key_value(*current);
      }
      end_of_line();
    }
    return root;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, what); }

  void skip_blank() {
    while (!at_end() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  void skip_comment() {
    while (!at_end() && text_[pos_] != '\n') ++pos_;
  }

  void advance_line() {
    ++pos_;
    ++line_;
  }

  void end_of_line() {
    skip_blank();
    if (at_end()) return;
    if (text_[pos_] == '#') skip_comment();
    if (at_end()) return;
    if (text_[pos_] != '\n') fail("unexpected trailing characters");
    advance_line();
  }

  std::string key_segment() {
    skip_blank();
    if (at_end()) fail("expected a key");
    if (text_[pos_] == '"') return basic_string();
    if (text_[pos_] == '\'') return literal_string();
    const std::size_t start = pos_;
    while (!at_end() && is_bare_key_char(text_[pos_])) ++pos_;
    if (start == pos_) fail("expected a key");
    return std::string(text_.substr(start, pos_ - start));
  }

  std::vector<std::string> dotted_key() {
    std::vector<std::string> parts;
    parts.push_back(key_segment());
    skip_blank();
    while (!at_end() && text_[pos_] == '.') {
      ++pos_;
      parts.push_back(key_segment());
      skip_blank();
    }
    return parts;
  }

  // Descends one path segment for a header, creating implicit tables.
  Table* descend(Table* t, const std::string& seg) {
    for (auto& [k, sub] : t->tables) {
      if (k == seg) return &sub;
    }
    for (auto& [k, arr] : t->arrays) {
      if (k == seg) return &arr.back();
    }
    if (t->value(seg)) fail("key '" + seg + "' is already a value");
    t->tables.emplace_back(seg, Table{});
    t->tables.back().second.line = line_;
    t->tables.back().second.implicit = true;
    return &t->tables.back().second;
  }

  Table* header(Table& root) {
    ++pos_;
    const bool is_array = !at_end() && text_[pos_] == '[';
    if (is_array) ++pos_;
    const auto path = dotted_key();
    if (at_end() || text_[pos_] != ']') fail("unterminated table header");
    ++pos_;
    if (is_array) {
      if (at_end() || text_[pos_] != ']') fail("unterminated array-of-tables header");
      ++pos_;
    }

    Table* t = &root;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) t = descend(t, path[i]);
    const std::string& last = path.back();

    if (is_array) {
      if (t->value(last) || t->table(last)) fail("'" + last + "' is not an array of tables");
      for (auto& [k, arr] : t->arrays) {
        if (k == last) {
          arr.emplace_back();
          arr.back().line = line_;
          return &arr.back();
        }
      }
      t->arrays.emplace_back(last, std::vector<Table>(1));
      t->arrays.back().second.back().line = line_;
      return &t->arrays.back().second.back();
    }

    if (t->value(last) || t->array(last)) fail("'" + last + "' is already defined");
    for (auto& [k, sub] : t->tables) {
      if (k == last) {
        // A table created implicitly by a deeper header may be defined once.
        if (sub.implicit) {
          sub.implicit = false;
          sub.line = line_;
          return &sub;
        }
        fail("table '" + last + "' defined twice");
      }
    }
    t->tables.emplace_back(last, Table{});
    t->tables.back().second.line = line_;
    return &t->tables.back().second;
  }

  void key_value(Table& t) {
    const auto path = dotted_key();
    if (path.size() != 1) fail("dotted keys are not supported in assignments");
    skip_blank();
    if (at_end() || text_[pos_] != '=') fail("expected '=' after key '" + path[0] + "'");
    ++pos_;
    skip_blank();
    Value v = value();
    if (t.value(path[0]) || t.table(path[0]) || t.array(path[0])) {
      fail("duplicate key '" + path[0] + "'");
    }
    t.values.emplace_back(path[0], std::move(v));
  }

  Value value() {
    if (at_end() || text_[pos_] == '\n') fail("missing value");
    Value v;
    v.line = line_;
    const char c = text_[pos_];
    if (c == '"') {
      v.data = basic_string();
    } else if (c == '\'') {
      v.data = literal_string();
    } else if (text_.substr(pos_, 4) == "true" && !continues_token(pos_ + 4)) {
      v.data = true;
      pos_ += 4;
    } else if (text_.substr(pos_, 5) == "false" && !continues_token(pos_ + 5)) {
      v.data = false;
      pos_ += 5;
    } else if (c == '[' || c == '{') {
      fail("arrays and inline tables are not supported");
    } else {
      number(v);
    }
    return v;
  }

  bool continues_token(std::size_t at) const {
    return at < text_.size() && is_bare_key_char(text_[at]);
  }

  void number(Value& v) {
    const std::size_t start = pos_;
    while (!at_end() && (is_bare_key_char(text_[pos_]) || text_[pos_] == '.' ||
                         text_[pos_] == '+')) {
      ++pos_;
    }
    std::string token;
    for (char ch : text_.substr(start, pos_ - start)) {
      if (ch != '_') token.push_back(ch);
    }
    if (token.empty()) fail("invalid value");

    std::string_view body = token;
    bool negative = false;
    if (body.front() == '+' || body.front() == '-') {
      negative = body.front() == '-';
      body.remove_prefix(1);
    }
    if (body == "inf" || body == "nan") {
      const double x = body == "inf" ? INFINITY : NAN;
      v.data = negative ? -x : x;
      return;
    }
    const bool is_float = token.find_first_of(".eE") != std::string::npos;
    if (is_float) {
      double x = 0.0;
      auto [ptr, ec] = std::from_chars(token.data() + (token[0] == '+' ? 1 : 0),
                                       token.data() + token.size(), x);
      if (ec != std::errc() || ptr != token.data() + token.size()) {
        fail("invalid float '" + token + "'");
      }
      v.data = x;
    } else {
      std::int64_t x = 0;
      auto [ptr, ec] = std::from_chars(token.data() + (token[0] == '+' ? 1 : 0),
                                       token.data() + token.size(), x);
      if (ec != std::errc() || ptr != token.data() + token.size()) {
        fail("invalid number '" + token + "'");
      }
      v.data = x;
    }
  }

  std::string literal_string() {
    ++pos_;
    const std::size_t start = pos_;
    while (!at_end() && text_[pos_] != '\'' && text_[pos_] != '\n') ++pos_;
    if (at_end() || text_[pos_] != '\'') fail("unterminated string");
    std::string out(text_.substr(start, pos_ - start));
    ++pos_;
    return out;
  }

  std::string basic_string() {
    ++pos_;
    std::string out;
    while (true) {
      if (at_end() || text_[pos_] == '\n') fail("unterminated string");
      const char c = text_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (at_end()) fail("unterminated escape");
      const char e = text_[pos_++];
      switch (e) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        case 'b': out.push_back('\b'); break;
        case 'f': out.push_back('\f'); break;
        case 'u': out.push_back(unicode_escape(4)); break;
        default: fail(std::string("unknown escape '\\") + e + "'");
      }
    }
    return out;
  }

  char unicode_escape(int digits) {
    if (pos_ + digits > text_.size()) fail("truncated unicode escape");
    unsigned code = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + pos_ + digits, code, 16);
    if (ec != std::errc() || ptr != text_.data() + pos_ + digits) fail("bad unicode escape");
    if (code > 0x7f) fail("non-ASCII unicode escapes are not supported");
    pos_ += digits;
    return static_cast<char>(code);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

}  // namespace

Table parse(std::string_view text) { return Parser(text).run(); }

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned>(c));
          out += buf;
        } else {
          out.push_back(c);
        }
    }
  }
  out.push_back('"');
  return out;
}

std::string format_float(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, ptr);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

}  // namespace tunnelswarm::toml
