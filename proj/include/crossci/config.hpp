#ifndef CROSSCI_CONFIG_HPP
#define CROSSCI_CONFIG_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace crossci::config {

/// Flat INI-style configuration: `[section]` headers, `key = value`
/// lines, `#` or `;` comments. Any key can be overridden through the
/// environment as CROSSCI_<SECTION>_<KEY> (upper case).
class Config {
public:
  static Config load(const std::string& path);
  static Config from_string(const std::string& text,
                            const std::string& origin = "<string>");
  Config() = default;

  bool has(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  long long get_int(const std::string& section, const std::string& key,
                    long long fallback) const;
  bool get_bool(const std::string& section, const std::string& key,
                bool fallback) const;
  std::vector<double> get_list(const std::string& section,
                               const std::string& key,
                               const std::vector<double>& fallback) const;

private:
  std::optional<std::string> raw(const std::string& section,
                                 const std::string& key) const;

  std::map<std::string, std::map<std::string, std::string>> sections_;
};

} // namespace crossci::config

#endif
