#include "symtop/keyvalue.hpp"

#include <fstream>

#include "symtop/errors.hpp"

namespace symtop {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

KeyValueDocument KeyValueDocument::parse(std::istream& in) {
  KeyValueDocument doc;
  std::string section;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ConfigError("line " + std::to_string(line_no) + ": malformed section header '" + raw + "'");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value', got '" + raw + "'");
    }
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    }
    doc.entries_.push_back({section, std::move(key), trim(line.substr(eq + 1)), line_no});
  }
  return doc;
}

KeyValueDocument KeyValueDocument::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return parse(in);
}

bool KeyValueDocument::has_section(const std::string& name) const {
  for (const auto& e : entries_) {
    if (e.section == name) return true;
  }
  return false;
}

std::vector<std::pair<std::string, std::string>> KeyValueDocument::section(const std::string& name) const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : entries_) {
    if (e.section == name) out.emplace_back(e.key, e.value);
  }
  return out;
}

std::optional<std::string> KeyValueDocument::find(const std::string& section, const std::string& key) const {
  std::optional<std::string> found;
  for (const auto& e : entries_) {
    if (e.section == section && e.key == key) found = e.value;
  }
  return found;
}

}  // namespace symtop
