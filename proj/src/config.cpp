#include "torus_wave/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "torus_wave/error.hpp"

namespace tw {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool valid_key(const std::string& key) {
  if (key.empty() || key.front() == '.' || key.back() == '.') return false;
  return std::all_of(key.begin(), key.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
  });
}

}  // namespace

double parse_number(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + text + "'");
  }
  return value;
}

ConfigMap ConfigMap::parse(const std::string& text) {
  ConfigMap map;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!valid_key(key)) throw ConfigError("config line " + std::to_string(line_no) + ": invalid key '" + key + "'");
    if (map.has(key)) throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    map.values_[key] = value;
  }
  return map;
}

ConfigMap ConfigMap::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  ConfigMap map = parse(buffer.str());
  map.base_dir = path.parent_path();
  return map;
}

std::optional<std::string> ConfigMap::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string ConfigMap::get_or(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

double ConfigMap::number(const std::string& key) const {
  const auto v = get(key);
  if (!v) throw ConfigError("config key '" + key + "' is required");
  return parse_number(*v, key);
}

double ConfigMap::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

long long ConfigMap::integer_or(const std::string& key, long long fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), value);
  if (ec != std::errc() || ptr != v->data() + v->size() || v->empty()) {
    throw ConfigError("config key '" + key + "': expected an integer, got '" + *v + "'");
  }
  return value;
}

bool ConfigMap::boolean_or(const std::string& key, bool fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw ConfigError("config key '" + key + "': expected true or false, got '" + *v + "'");
}

std::string ConfigMap::to_text() const {
  std::string out;
  for (const auto& [key, value] : values_) out += key + " = " + value + "\n";
  return out;
}

std::vector<std::string> ConfigMap::unknown_keys(const std::set<std::string>& known) const {
  std::vector<std::string> out;
  for (const auto& [key, value] : values_) {
    if (!known.count(key)) out.push_back(key);
  }
  return out;
}

}  // namespace tw
