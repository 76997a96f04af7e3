#include "crossci/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace crossci::config {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string env_name(const std::string& section, const std::string& key) {
  std::string name = "CROSSCI_" + section + "_" + key;
  std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) {
    return c == '-' ? '_' : std::toupper(c);
  });
  return name;
}

[[noreturn]] void bad_value(const std::string& section, const std::string& key,
                            const std::string& value, const char* kind) {
  throw std::runtime_error("config: [" + section + "] " + key + " = '" +
                           value + "' is not a valid " + kind);
}

} // namespace

Config Config::from_string(const std::string& text,
                           const std::string& origin) {
  Config cfg;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                 ": unterminated section header");
      section = lower(trim(t.substr(1, t.size() - 2)));
      if (section.empty())
        throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                 ": empty section name");
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                               ": expected 'key = value'");
    const std::string key = lower(trim(t.substr(0, eq)));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                               ": empty key");
    if (section.empty())
      throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                               ": key outside any [section]");
    cfg.sections_[section][key] = value;
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("config: cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return from_string(ss.str(), path);
}

std::optional<std::string> Config::raw(const std::string& section,
                                       const std::string& key) const {
  if (const char* env = std::getenv(env_name(section, key).c_str()))
    return std::string(env);
  const auto sit = sections_.find(lower(section));
  if (sit == sections_.end()) return std::nullopt;
  const auto kit = sit->second.find(lower(key));
  if (kit == sit->second.end()) return std::nullopt;
  return kit->second;
}

bool Config::has(const std::string& section, const std::string& key) const {
  return raw(section, key).has_value();
}

std::string Config::get_string(const std::string& section,
                               const std::string& key,
                               const std::string& fallback) const {
  return raw(section, key).value_or(fallback);
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
  const auto v = raw(section, key);
  if (!v) return fallback;
  try {
    std::size_t pos = 0;
    const double out = std::stod(*v, &pos);
    if (trim(v->substr(pos)).empty()) return out;
  } catch (const std::exception&) {
  }
  bad_value(section, key, *v, "number");
}

long long Config::get_int(const std::string& section, const std::string& key,
                          long long fallback) const {
  const auto v = raw(section, key);
  if (!v) return fallback;
  try {
    std::size_t pos = 0;
    const long long out = std::stoll(*v, &pos);
    if (trim(v->substr(pos)).empty()) return out;
  } catch (const std::exception&) {
  }
  bad_value(section, key, *v, "integer");
}

bool Config::get_bool(const std::string& section, const std::string& key,
                      bool fallback) const {
  const auto v = raw(section, key);
  if (!v) return fallback;
  const std::string t = lower(trim(*v));
  if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
  if (t == "false" || t == "no" || t == "off" || t == "0") return false;
  bad_value(section, key, *v, "boolean");
}

std::vector<double> Config::get_list(const std::string& section,
                                     const std::string& key,
                                     const std::vector<double>& fallback) const {
  const auto v = raw(section, key);
  if (!v) return fallback;
  std::vector<double> out;
  std::istringstream ss(*v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (t.empty()) bad_value(section, key, *v, "number list");
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(t, &pos));
      if (!trim(t.substr(pos)).empty()) bad_value(section, key, *v, "number list");
    } catch (const std::exception&) {
      bad_value(section, key, *v, "number list");
    }
  }
  if (out.empty()) bad_value(section, key, *v, "number list");
  return out;
}

} // namespace crossci::config
