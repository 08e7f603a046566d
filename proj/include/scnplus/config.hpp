#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "scnplus/dataset.hpp"
#include "scnplus/types.hpp"

namespace scnplus {

/// Flat configuration: "section.key" -> string value. Parsed from the
/// key = value text format with [section] headers, or from a JSON object of
/// objects (two levels deep) when the file starts with '{'.
class ConfigMap {
 public:
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& fallback = "") const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    double v = 0.0;
    if (!detail::parse_double(it->second, v))
      throw DataError("config: '" + key + "' is not a number: " + it->second);
    return v;
  }

  long get_int(const std::string& key, long fallback) const {
    const double v = get_double(key, static_cast<double>(fallback));
    return static_cast<long>(v);
  }

  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      return std::stoull(it->second);
    } catch (const std::exception&) {
      throw DataError("config: '" + key + "' is not an unsigned integer: " + it->second);
    }
  }

  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    std::stringstream ss(it->second);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      double v = 0.0;
      if (!detail::parse_double(cell, v))
        throw DataError("config: bad list entry in '" + key + "': " + cell);
      out.push_back(v);
    }
    if (out.empty()) throw DataError("config: empty list for '" + key + "'");
    return out;
  }

  const std::map<std::string, std::string>& raw() const { return values_; }

  nlohmann::json to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : values_) j[k] = v;
    return j;
  }

 private:
  std::map<std::string, std::string> values_;
};

namespace detail {

inline void flatten_json_into(const nlohmann::json& j, const std::string& prefix,
                              ConfigMap& out) {
  for (const auto& [key, value] : j.items()) {
    const std::string full = prefix.empty() ? key : prefix + "." + key;
    if (value.is_object()) {
      flatten_json_into(value, full, out);
    } else if (value.is_string()) {
      out.set(full, value.get<std::string>());
    } else if (value.is_array()) {
      std::string list;
      for (const auto& item : value) {
        if (!list.empty()) list += ",";
        list += item.is_string() ? item.get<std::string>() : item.dump();
      }
      out.set(full, list);
    } else {
      out.set(full, value.dump());
    }
  }
}

}  // namespace detail

inline ConfigMap parse_config_text(const std::string& text) {
  ConfigMap config;
  const std::string trimmed = detail::trim(text);
  if (!trimmed.empty() && trimmed.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(trimmed);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("config: malformed JSON: ") + e.what());
    }
    detail::flatten_json_into(j, "", config);
    return config;
  }

  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t.front() == '#' || t.front() == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw DataError("config: malformed section header at line " + std::to_string(lineno));
      section = detail::trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw DataError("config: expected key = value at line " + std::to_string(lineno));
    const std::string key = detail::trim(t.substr(0, eq));
    const std::string value = detail::trim(t.substr(eq + 1));
    if (key.empty()) throw DataError("config: empty key at line " + std::to_string(lineno));
    config.set(section.empty() ? key : section + "." + key, value);
  }
  return config;
}

inline ConfigMap load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace scnplus
