#pragma once

// Plain-text "key = value" records grouped under optional [section] headers.
// '#' starts a comment. Keys before the first header belong to section "".

#include <istream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace symtop {

struct KeyValueEntry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

class KeyValueDocument {
 public:
  /// Throws ConfigError on malformed lines, naming the line number.
  static KeyValueDocument parse(std::istream& in);
  static KeyValueDocument load(const std::string& path);

  const std::vector<KeyValueEntry>& entries() const { return entries_; }
  bool has_section(const std::string& section) const;
  std::vector<std::pair<std::string, std::string>> section(const std::string& name) const;
  std::optional<std::string> find(const std::string& section, const std::string& key) const;

 private:
  std::vector<KeyValueEntry> entries_;
};

}  // namespace symtop
