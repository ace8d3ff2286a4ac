#include "cli/config.hpp"

#include <cerrno>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "regbf/errors.hpp"

namespace regbf::cli {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool valid_key(const std::string& key) {
  if (key.empty() || key.front() == '.' || key.back() == '.') return false;
  for (std::size_t i = 0; i < key.size(); ++i) {
    const char c = key[i];
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                    c == '-' || c == '.';
    if (!ok) return false;
    if (c == '.' && key[i + 1] == '.') return false;
  }
  return true;
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE) {
    throw ConfigError(fmt::format("config key '{}': '{}' is not a number", key, text));
  }
  return v;
}

}  // namespace

Config Config::parse(std::string_view text, const std::string& source) {
  Config cfg;
  cfg.source_ = source;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    // '#' starts a comment unless inside double quotes.
    bool quoted = false;
    std::size_t cut = line.size();
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        cut = i;
        break;
      }
    }
    const std::string body = trim(line.substr(0, cut));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("{}:{}: expected 'key = value'", source, line_no));
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    std::string value = trim(std::string_view(body).substr(eq + 1));
    if (!valid_key(key)) throw ConfigError(fmt::format("{}:{}: invalid key '{}'", source, line_no, key));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (cfg.values_.count(key)) throw ConfigError(fmt::format("{}:{}: duplicate key '{}'", source, line_no, key));
    cfg.values_[key] = value;
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

std::optional<std::string> Config::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return raw(key).value_or(fallback);
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto v = raw(key);
  return v ? to_double(key, *v) : fallback;
}

int Config::get_int(const std::string& key, int fallback) const {
  const auto v = raw(key);
  if (!v) return fallback;
  const double d = to_double(key, *v);
  if (d != static_cast<int>(d)) throw ConfigError(fmt::format("config key '{}': '{}' is not an integer", key, *v));
  return static_cast<int>(d);
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto v = raw(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
  if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
  throw ConfigError(fmt::format("config key '{}': '{}' is not a boolean", key, *v));
}

std::vector<double> Config::get_list(const std::string& key, const std::vector<double>& fallback) const {
  const auto v = raw(key);
  if (!v) return fallback;
  std::vector<double> out;
  if (v->find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(*v);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() != 3) throw ConfigError(fmt::format("config key '{}': range must be lo:hi:n", key));
    const double lo = to_double(key, parts[0]);
    const double hi = to_double(key, parts[1]);
    const double nd = to_double(key, parts[2]);
    const int n = static_cast<int>(nd);
    if (n != nd || n < 1) throw ConfigError(fmt::format("config key '{}': point count must be a positive integer", key));
    for (int i = 0; i < n; ++i) out.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
    return out;
  }
  std::stringstream ss(*v);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(to_double(key, item));
  if (out.empty()) throw ConfigError(fmt::format("config key '{}': empty list", key));
  return out;
}

void Config::require_known(const std::set<std::string>& allowed) const {
  for (const auto& [key, value] : values_) {
    bool ok = allowed.count(key) != 0;
    for (const auto& a : allowed) {
      if (!ok && !a.empty() && a.back() == '*' && key.compare(0, a.size() - 1, a, 0, a.size() - 1) == 0) ok = true;
    }
    if (!ok) throw ConfigError(fmt::format("{}: unknown config key '{}' for this command", source_, key));
  }
}

std::string Config::canonical() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash(const Config& cfg) { return fmt::format("{:016x}", fnv1a(cfg.canonical())); }

}  // namespace regbf::cli
