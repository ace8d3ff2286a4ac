#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace regbf::cli {

// Flat `key = value` configuration with dotted keys and '#' comments.
class Config {
 public:
  static Config parse(std::string_view text, const std::string& source = "<config>");
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // Comma-separated list, or `lo:hi:n` for n evenly spaced points.
  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;

  // Throws ConfigError naming the first key outside the allowed set; a trailing '*' matches a prefix.
  void require_known(const std::set<std::string>& allowed) const;

  const std::map<std::string, std::string>& entries() const { return values_; }
  // Sorted `key = value` lines; input to the config hash.
  std::string canonical() const;

 private:
  std::optional<std::string> raw(const std::string& key) const;
  std::map<std::string, std::string> values_;
  std::string source_;
};

// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view data);
std::string config_hash(const Config& cfg);

}  // namespace regbf::cli
