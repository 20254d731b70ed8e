#pragma once

// Minimal INI reader shared by the experiment configs, dataset schemas and
// manifests. Sections in brackets, key = value pairs, # and ; comments,
// whitespace trimmed. Keys before any section header live in section "".

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace binotab {

inline std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

class IniFile {
 public:
  struct Section {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;  // insertion order
  };

  static IniFile parse_string(const std::string& text, const std::string& origin = "<string>") {
    IniFile ini;
    ini.sections_.push_back(Section{"", {}});
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      std::string t = trim(line);
      if (t.empty() || t[0] == '#' || t[0] == ';') continue;
      if (t.front() == '[') {
        if (t.back() != ']') {
          throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                                   ": unterminated section header");
        }
        ini.sections_.push_back(Section{trim(t.substr(1, t.size() - 2)), {}});
        continue;
      }
      const auto eq = t.find('=');
      if (eq == std::string::npos) {
        throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                                 ": expected key = value, got '" + t + "'");
      }
      ini.sections_.back().entries.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return ini;
  }

  static IniFile parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
  }

  bool has_section(std::string_view name) const { return find(name) != nullptr; }

  bool has(std::string_view section, std::string_view key) const {
    const Section* s = find(section);
    if (!s) return false;
    for (const auto& [k, v] : s->entries) {
      if (k == key) return true;
    }
    return false;
  }

  // Last occurrence wins.
  std::string get(std::string_view section, std::string_view key) const {
    const Section* s = find(section);
    const std::string* found = nullptr;
    if (s) {
      for (const auto& [k, v] : s->entries) {
        if (k == key) found = &v;
      }
    }
    if (!found) {
      throw std::runtime_error("missing key '" + std::string(key) + "' in section [" +
                               std::string(section) + "]");
    }
    return *found;
  }

  std::string get_or(std::string_view section, std::string_view key,
                     const std::string& fallback) const {
    return has(section, key) ? get(section, key) : fallback;
  }

  const std::vector<Section>& sections() const { return sections_; }

  const Section* find(std::string_view name) const {
    for (const auto& s : sections_) {
      if (s.name == name) return &s;
    }
    return nullptr;
  }

 private:
  std::vector<Section> sections_;
};

inline double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (trim(text.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw std::runtime_error("cannot parse " + what + " as a number: '" + text + "'");
}

inline long long parse_int(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (trim(text.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw std::runtime_error("cannot parse " + what + " as an integer: '" + text + "'");
}

inline bool parse_bool(const std::string& text, const std::string& what) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw std::runtime_error("cannot parse " + what + " as a boolean: '" + text + "'");
}

}  // namespace binotab
