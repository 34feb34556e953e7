#pragma once

// Line-oriented experiment configuration: [section] headers over key = value
// pairs. Unknown sections or keys are errors, as are duplicates; `inf` is
// accepted wherever an extended real makes sense. Full-line comments start
// with '#'.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "intervalci/errors.hpp"
#include "intervalci/normal.hpp"

namespace intervalci {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace detail

/// Parses "inf"/"+inf"/"-inf" (case-insensitive) or a decimal literal.
inline double parse_extended_real(const std::string& text) {
  const std::string t = detail::lower(detail::trim(text));
  if (t == "inf" || t == "+inf" || t == "infinity") return kInf;
  if (t == "-inf" || t == "-infinity") return -kInf;
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(t, &pos);
  } catch (const std::exception&) {
    throw DomainError("cannot parse number from '" + text + "'");
  }
  if (pos != t.size()) throw DomainError("trailing characters in number '" + text + "'");
  return v;
}

class ConfigFile {
 public:
  static ConfigFile parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
  }

  static ConfigFile parse_string(const std::string& text, const std::string& origin = "<string>") {
    ConfigFile cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string t = detail::trim(line);
      if (t.empty() || t[0] == '#') continue;
      if (t.front() == '[') {
        if (t.back() != ']')
          throw DomainError(origin + ":" + std::to_string(lineno) + ": malformed section header");
        section = detail::trim(t.substr(1, t.size() - 2));
        if (section.empty())
          throw DomainError(origin + ":" + std::to_string(lineno) + ": empty section name");
        cfg.sections_[section];  // record even if empty
        continue;
      }
      const auto eq = t.find('=');
      if (eq == std::string::npos)
        throw DomainError(origin + ":" + std::to_string(lineno) + ": expected key = value");
      if (section.empty())
        throw DomainError(origin + ":" + std::to_string(lineno) + ": key outside any [section]");
      const std::string key = detail::trim(t.substr(0, eq));
      const std::string value = detail::trim(t.substr(eq + 1));
      if (key.empty())
        throw DomainError(origin + ":" + std::to_string(lineno) + ": empty key");
      auto& sec = cfg.sections_[section];
      if (sec.count(key))
        throw DomainError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key +
                          "' in [" + section + "]");
      sec[key] = value;
    }
    return cfg;
  }

  bool has_section(const std::string& section) const { return sections_.count(section) > 0; }

  bool has(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    return it != sections_.end() && it->second.count(key) > 0;
  }

  std::string get_string(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    if (it == sections_.end()) throw DomainError("missing config section [" + section + "]");
    auto kt = it->second.find(key);
    if (kt == it->second.end())
      throw DomainError("missing config key '" + key + "' in [" + section + "]");
    return kt->second;
  }

  std::string get_string_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
    return has(section, key) ? get_string(section, key) : fallback;
  }

  double get_real(const std::string& section, const std::string& key) const {
    return parse_extended_real(get_string(section, key));
  }

  double get_real_or(const std::string& section, const std::string& key, double fallback) const {
    return has(section, key) ? get_real(section, key) : fallback;
  }

  std::int64_t get_int(const std::string& section, const std::string& key) const {
    const std::string s = get_string(section, key);
    try {
      std::size_t pos = 0;
      const long long v = std::stoll(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw DomainError("config key '" + key + "' in [" + section + "] is not an integer: '" +
                        s + "'");
    }
  }

  std::int64_t get_int_or(const std::string& section, const std::string& key,
                          std::int64_t fallback) const {
    return has(section, key) ? get_int(section, key) : fallback;
  }

  bool get_bool_or(const std::string& section, const std::string& key, bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = detail::lower(get_string(section, key));
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw DomainError("config key '" + key + "' in [" + section + "] is not a boolean: '" + v +
                      "'");
  }

  std::vector<double> get_real_list(const std::string& section, const std::string& key) const {
    const std::string s = get_string(section, key);
    std::vector<double> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
      const std::string t = detail::trim(item);
      if (t.empty())
        throw DomainError("empty element in list '" + key + "' of [" + section + "]");
      out.push_back(parse_extended_real(t));
    }
    if (out.empty()) throw DomainError("empty list for key '" + key + "' in [" + section + "]");
    return out;
  }

  std::vector<std::int64_t> get_int_list(const std::string& section,
                                         const std::string& key) const {
    std::vector<std::int64_t> out;
    for (double v : get_real_list(section, key)) {
      const auto i = static_cast<std::int64_t>(v);
      if (static_cast<double>(i) != v)
        throw DomainError("list '" + key + "' in [" + section + "] must contain integers");
      out.push_back(i);
    }
    return out;
  }

  /// Rejects sections or keys outside the allowed schema.
  void enforce_schema(
      const std::map<std::string, std::set<std::string>>& allowed) const {
    for (const auto& [section, keys] : sections_) {
      auto it = allowed.find(section);
      if (it == allowed.end()) throw DomainError("unknown config section [" + section + "]");
      for (const auto& [key, value] : keys) {
        (void)value;
        if (!it->second.count(key))
          throw DomainError("unknown config key '" + key + "' in [" + section + "]");
      }
    }
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

}  // namespace intervalci
