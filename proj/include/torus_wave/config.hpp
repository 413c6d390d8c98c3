#pragma once

// Line-based `key = value` scenario files. Keys may be dotted (`model.omega`); `#` starts a comment.

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace tw {

class ConfigMap {
 public:
  static ConfigMap parse(const std::string& text);
  static ConfigMap load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  void erase(const std::string& key) { values_.erase(key); }
  const std::map<std::string, std::string>& values() const noexcept { return values_; }

  std::optional<std::string> get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  /// Throws ConfigError naming the key when the value is missing or malformed.
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  long long integer_or(const std::string& key, long long fallback) const;
  bool boolean_or(const std::string& key, bool fallback) const;

  /// `key = value` lines in key order.
  std::string to_text() const;

  /// Keys not in `known`, sorted.
  std::vector<std::string> unknown_keys(const std::set<std::string>& known) const;

  /// Directory that relative paths in the file refer to.
  std::filesystem::path base_dir;

 private:
  std::map<std::string, std::string> values_;
};

double parse_number(const std::string& text, const std::string& key);

}  // namespace tw
