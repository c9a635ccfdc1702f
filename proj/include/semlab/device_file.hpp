#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace semlab {

/// Parse error carrying the 1-based source line.
class DeviceFileError : public std::runtime_error {
 public:
  DeviceFileError(const std::string& what, int line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Values allowed by the key-value format.
using KvValue = std::variant<double, std::string, bool, std::vector<double>>;

/// A parsed file: section name ("" for the top level) -> key -> value.
struct KvDocument {
  std::map<std::string, std::map<std::string, KvValue>> sections;

  bool has(const std::string& section, const std::string& key) const;
  const KvValue* find(const std::string& section, const std::string& key) const;
};

/// Parses the TOML subset used by device files:
///
///   # comment
///   key = 1.5            (numbers, "strings", true/false, [1, 2, 3])
///   [section]
///   7 = 274              (bare integer keys are allowed)
///
/// Duplicate keys, duplicate sections and anything else are errors.
KvDocument parse_kv(std::string_view text);
KvDocument parse_kv_file(const std::filesystem::path& path);

}  // namespace semlab
