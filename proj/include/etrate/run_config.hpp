#pragma once

// Plain key-value run configuration:
//
//   # comment
//   plant.a = 1.0
//   trigger.v0 = 0.2671
//
// Every value remembers where it came from ("file:line" or "--set") so
// errors point at the offending line.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace etrate {

class RunConfig {
 public:
  /// Throws ConfigError("path:line: ...") on malformed lines or duplicate keys.
  static RunConfig load(const std::string& path);
  static RunConfig parse(std::istream& in, const std::string& origin);

  /// Inserts or overrides a value (flags win over the file).
  void set(const std::string& key, const std::string& value, const std::string& origin);
  /// Parses "key=value" as given to --set.
  void set_assignment(const std::string& assignment);

  [[nodiscard]] bool has(const std::string& key) const;
  [[nodiscard]] std::vector<std::string> keys() const;
  /// "file:line" of the key, or "" when absent.
  [[nodiscard]] std::string origin(const std::string& key) const;

  [[nodiscard]] std::string str(const std::string& key) const;
  [[nodiscard]] std::string str(const std::string& key, const std::string& fallback) const;
  [[nodiscard]] double number(const std::string& key) const;
  [[nodiscard]] double number(const std::string& key, double fallback) const;
  [[nodiscard]] std::vector<double> numbers(const std::string& key) const;
  [[nodiscard]] std::vector<double> numbers(const std::string& key,
                                            const std::vector<double>& fallback) const;
  [[nodiscard]] long long integer(const std::string& key, long long fallback) const;
  [[nodiscard]] std::uint64_t unsigned64(const std::string& key, std::uint64_t fallback) const;
  [[nodiscard]] bool flag(const std::string& key, bool fallback) const;

  /// ConfigError naming the first key outside `allowed`.
  void require_known(const std::set<std::string>& allowed) const;

  /// ConfigError prefixed with the key's origin.
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

 private:
  struct Entry {
    std::string value;
    std::string origin;
  };
  std::map<std::string, Entry> entries_;
};

}  // namespace etrate
