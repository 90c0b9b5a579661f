#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "chiralvdw/linalg.hpp"

namespace chiralvdw {

// Small key/value format shared by molecule and run configuration files:
//
//   # comment
//   units = atomic
//   name = "3MCP-like"
//   transition { omega = 1.0, d = [1, 0, 0], m_imag = [1, 0, 0] }
//
// Entries are separated by newlines, ',' or ';'. Blocks nest and may repeat.
struct TextValue {
  std::vector<std::string> items;
  bool list = false;
  int line = 0;
};

class TextDocument {
 public:
  static TextDocument parse(std::string_view text, const std::string& origin = "<text>");
  static TextDocument load(const std::string& path);

  bool has(std::string_view key) const;
  const TextValue* find(std::string_view key) const;

  std::string get_string(std::string_view key) const;
  std::string get_string(std::string_view key, const std::string& fallback) const;
  double get_double(std::string_view key) const;
  double get_double(std::string_view key, double fallback) const;
  int get_int(std::string_view key) const;
  int get_int(std::string_view key, int fallback) const;
  bool get_bool(std::string_view key, bool fallback) const;
  Vector3 get_vector3(std::string_view key) const;
  std::vector<double> get_doubles(std::string_view key) const;

  std::vector<const TextDocument*> blocks(std::string_view name) const;
  const TextDocument* block(std::string_view name) const;
  TextDocument& block_or_create(std::string_view name);

  // Keys of the scalar/list entries and the names of blocks, in file order.
  std::vector<std::string> keys() const;

  void set(std::string_view key, TextValue value);
  // `dotted` addresses nested blocks: "plate.chirality" -> block plate, key chirality.
  // `raw` is parsed as a single value ("-1", "[1, 2]", "\"a b\"").
  void set_dotted(std::string_view dotted, std::string_view raw);
  // Dotted lookup; returns nullptr when absent.
  const TextValue* find_dotted(std::string_view dotted) const;

  std::string to_text(int indent = 0) const;
  std::string origin() const { return origin_; }

 private:
  struct Entry {
    std::string key;
    bool is_block = false;
    TextValue value;
    std::vector<TextDocument> block;  // exactly one element when is_block
  };
  friend class TextParser;

  const TextValue& require(std::string_view key) const;
  std::string where(const TextValue& v) const;

  std::vector<Entry> entries_;
  std::string origin_ = "<text>";
};

}  // namespace chiralvdw
