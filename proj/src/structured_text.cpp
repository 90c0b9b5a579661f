#include "chiralvdw/structured_text.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "chiralvdw/errors.hpp"

namespace chiralvdw {

namespace {

enum class Tok { word, string, lbrace, rbrace, lbracket, rbracket, equals, separator, end };

struct Token {
  Tok kind;
  std::string text;
  int line;
};

bool is_special(char c) {
  return c == '{' || c == '}' || c == '[' || c == ']' || c == '=' || c == ',' || c == ';' || c == '#' || c == '"';
}

std::vector<Token> tokenize(std::string_view text, const std::string& origin) {
  std::vector<Token> out;
  int line = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      out.push_back({Tok::separator, "\n", line});
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (c == '"') {
      std::string s;
      ++i;
      while (i < text.size() && text[i] != '"') {
        if (text[i] == '\n') throw ConfigError(origin + ":" + std::to_string(line) + ": unterminated string");
        if (text[i] == '\\' && i + 1 < text.size()) ++i;
        s += text[i++];
      }
      if (i >= text.size()) throw ConfigError(origin + ":" + std::to_string(line) + ": unterminated string");
      ++i;
      out.push_back({Tok::string, s, line});
    } else if (is_special(c)) {
      Tok kind = Tok::separator;
      switch (c) {
        case '{': kind = Tok::lbrace; break;
        case '}': kind = Tok::rbrace; break;
        case '[': kind = Tok::lbracket; break;
        case ']': kind = Tok::rbracket; break;
        case '=': kind = Tok::equals; break;
        default: kind = Tok::separator; break;
      }
      out.push_back({kind, std::string(1, c), line});
      ++i;
    } else {
      std::size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) && !is_special(text[j])) ++j;
      out.push_back({Tok::word, std::string(text.substr(i, j - i)), line});
      i = j;
    }
  }
  out.push_back({Tok::end, "", line});
  return out;
}

bool is_bare(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return !std::isspace(static_cast<unsigned char>(c)) && !is_special(c);
  });
}

std::string render_item(const std::string& s) {
  if (is_bare(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

double parse_number(const std::string& s, bool& ok) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  ok = ec == std::errc() && ptr == last;
  return v;
}

}  // namespace

class TextParser {
 public:
  TextParser(std::vector<Token> tokens, std::string origin) : tokens_(std::move(tokens)), origin_(std::move(origin)) {}

  void body(TextDocument& doc, bool inside_block) {
    for (;;) {
      while (peek().kind == Tok::separator) ++pos_;
      const Token& t = peek();
      if (t.kind == Tok::end) {
        if (inside_block) fail(t, "missing '}'");
        return;
      }
      if (t.kind == Tok::rbrace) {
        if (!inside_block) fail(t, "unexpected '}'");
        ++pos_;
        return;
      }
      if (t.kind != Tok::word) fail(t, "expected a key");
      const std::string key = t.text;
      ++pos_;
      const Token& op = peek();
      if (op.kind == Tok::lbrace) {
        ++pos_;
        TextDocument child;
        child.origin_ = origin_;
        body(child, true);
        TextDocument::Entry e;
        e.key = key;
        e.is_block = true;
        e.value.line = op.line;
        e.block.push_back(std::move(child));
        doc.entries_.push_back(std::move(e));
      } else if (op.kind == Tok::equals) {
        ++pos_;
        TextValue v = value();
        doc.set(key, std::move(v));
        const Token& after = peek();
        if (after.kind != Tok::separator && after.kind != Tok::rbrace && after.kind != Tok::end) {
          fail(after, "expected end of entry after value of '" + key + "'");
        }
      } else {
        fail(op, "expected '=' or '{' after '" + key + "'");
      }
    }
  }

  TextValue value() {
    TextValue v;
    const Token& t = peek();
    v.line = t.line;
    if (t.kind == Tok::word || t.kind == Tok::string) {
      v.items.push_back(t.text);
      ++pos_;
      return v;
    }
    if (t.kind != Tok::lbracket) fail(t, "expected a value");
    ++pos_;
    v.list = true;
    for (;;) {
      while (peek().kind == Tok::separator) ++pos_;
      const Token& item = peek();
      if (item.kind == Tok::rbracket) {
        ++pos_;
        return v;
      }
      if (item.kind != Tok::word && item.kind != Tok::string) fail(item, "expected a list item or ']'");
      v.items.push_back(item.text);
      ++pos_;
    }
  }

  bool at_end() const { return tokens_[pos_].kind == Tok::end; }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  [[noreturn]] void fail(const Token& t, const std::string& msg) const {
    throw ConfigError(origin_ + ":" + std::to_string(t.line) + ": " + msg);
  }

  std::vector<Token> tokens_;
  std::string origin_;
  std::size_t pos_ = 0;
};

TextDocument TextDocument::parse(std::string_view text, const std::string& origin) {
  TextParser parser(tokenize(text, origin), origin);
  TextDocument doc;
  doc.origin_ = origin;
  parser.body(doc, false);
  return doc;
}

TextDocument TextDocument::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

const TextValue* TextDocument::find(std::string_view key) const {
  for (const auto& e : entries_) {
    if (!e.is_block && e.key == key) return &e.value;
  }
  return nullptr;
}

bool TextDocument::has(std::string_view key) const { return find(key) != nullptr; }

std::string TextDocument::where(const TextValue& v) const { return origin_ + ":" + std::to_string(v.line); }

const TextValue& TextDocument::require(std::string_view key) const {
  const TextValue* v = find(key);
  if (!v) throw ConfigError(origin_ + ": missing key '" + std::string(key) + "'");
  return *v;
}

std::string TextDocument::get_string(std::string_view key) const {
  const TextValue& v = require(key);
  if (v.list || v.items.size() != 1) throw ConfigError(where(v) + ": key '" + std::string(key) + "' must be a scalar");
  return v.items.front();
}

std::string TextDocument::get_string(std::string_view key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

double TextDocument::get_double(std::string_view key) const {
  const TextValue& v = require(key);
  if (v.list || v.items.size() != 1) throw ConfigError(where(v) + ": key '" + std::string(key) + "' must be a number");
  bool ok = false;
  const double x = parse_number(v.items.front(), ok);
  if (!ok) throw ConfigError(where(v) + ": key '" + std::string(key) + "' is not a number: " + v.items.front());
  return x;
}

double TextDocument::get_double(std::string_view key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

int TextDocument::get_int(std::string_view key) const {
  const double x = get_double(key);
  if (x != static_cast<double>(static_cast<long>(x))) {
    throw ConfigError(where(require(key)) + ": key '" + std::string(key) + "' must be an integer");
  }
  return static_cast<int>(x);
}

int TextDocument::get_int(std::string_view key, int fallback) const { return has(key) ? get_int(key) : fallback; }

bool TextDocument::get_bool(std::string_view key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string s = get_string(key);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(where(require(key)) + ": key '" + std::string(key) + "' must be a boolean");
}

std::vector<double> TextDocument::get_doubles(std::string_view key) const {
  const TextValue& v = require(key);
  std::vector<double> out;
  for (const auto& item : v.items) {
    bool ok = false;
    out.push_back(parse_number(item, ok));
    if (!ok) throw ConfigError(where(v) + ": key '" + std::string(key) + "' has a non-numeric item: " + item);
  }
  return out;
}

Vector3 TextDocument::get_vector3(std::string_view key) const {
  const std::vector<double> xs = get_doubles(key);
  if (xs.size() != 3 || !require(key).list) {
    throw ConfigError(where(require(key)) + ": key '" + std::string(key) + "' must be a 3-element list");
  }
  return Vector3(xs[0], xs[1], xs[2]);
}

std::vector<const TextDocument*> TextDocument::blocks(std::string_view name) const {
  std::vector<const TextDocument*> out;
  for (const auto& e : entries_) {
    if (e.is_block && e.key == name) out.push_back(&e.block.front());
  }
  return out;
}

const TextDocument* TextDocument::block(std::string_view name) const {
  for (const auto& e : entries_) {
    if (e.is_block && e.key == name) return &e.block.front();
  }
  return nullptr;
}

TextDocument& TextDocument::block_or_create(std::string_view name) {
  for (auto& e : entries_) {
    if (e.is_block && e.key == name) return e.block.front();
  }
  Entry e;
  e.key = std::string(name);
  e.is_block = true;
  TextDocument child;
  child.origin_ = origin_;
  e.block.push_back(std::move(child));
  entries_.push_back(std::move(e));
  return entries_.back().block.front();
}

std::vector<std::string> TextDocument::keys() const {
  std::vector<std::string> out;
  for (const auto& e : entries_) out.push_back(e.key);
  return out;
}

void TextDocument::set(std::string_view key, TextValue value) {
  for (auto& e : entries_) {
    if (!e.is_block && e.key == key) {
      e.value = std::move(value);
      return;
    }
  }
  Entry e;
  e.key = std::string(key);
  e.value = std::move(value);
  entries_.push_back(std::move(e));
}

void TextDocument::set_dotted(std::string_view dotted, std::string_view raw) {
  const std::size_t dot = dotted.find('.');
  if (dot != std::string_view::npos) {
    block_or_create(dotted.substr(0, dot)).set_dotted(dotted.substr(dot + 1), raw);
    return;
  }
  if (dotted.empty()) throw ConfigError("override has an empty key");
  TextParser parser(tokenize(raw, "--set"), "--set " + std::string(dotted));
  TextValue v = parser.value();
  if (!parser.at_end()) throw ConfigError("--set " + std::string(dotted) + ": trailing characters in value");
  set(dotted, std::move(v));
}

const TextValue* TextDocument::find_dotted(std::string_view dotted) const {
  const std::size_t dot = dotted.find('.');
  if (dot == std::string_view::npos) return find(dotted);
  const TextDocument* child = block(dotted.substr(0, dot));
  return child ? child->find_dotted(dotted.substr(dot + 1)) : nullptr;
}

std::string TextDocument::to_text(int indent) const {
  std::string pad(static_cast<std::size_t>(indent), ' ');
  std::string out;
  for (const auto& e : entries_) {
    if (e.is_block) {
      out += pad + e.key + " {\n" + e.block.front().to_text(indent + 2) + pad + "}\n";
      continue;
    }
    out += pad + e.key + " = ";
    if (e.value.list) {
      out += "[";
      for (std::size_t i = 0; i < e.value.items.size(); ++i) {
        if (i) out += ", ";
        out += render_item(e.value.items[i]);
      }
      out += "]";
    } else {
      out += render_item(e.value.items.front());
    }
    out += "\n";
  }
  return out;
}

}  // namespace chiralvdw
