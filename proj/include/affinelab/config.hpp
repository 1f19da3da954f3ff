#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace affinelab {

/// Raised for malformed or out-of-range configuration; `key()` names the
/// offending entry as `section.key`.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error("config error at '" + key + "': " + message), key_(std::move(key)) {}

  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Flat sectioned key-value configuration:
///
///   # comment
///   [model]
///   a = 1.0
///   [measure.mu]
///   points = [[0.5, 0.0, 1.0]]
///
/// Entries are addressed as "section.key". Values are kept as text: quoted
/// strings are unquoted, bracketed values (which may span lines) are JSON
/// arrays, everything else is a bare scalar.
class Config {
 public:
  static Config parse(std::string_view text);
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  bool has_section(const std::string& section) const;
  void set(const std::string& key, std::string value) { entries_[key] = std::move(value); }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_double_list(const std::string& key, const std::vector<double>& fallback) const;
  /// Rows of a JSON array of numeric arrays, e.g. `[[1, 0, 0.5], [2, 0, 0.5]]`.
  std::vector<std::vector<double>> get_matrix(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace affinelab
