#include "etrate/run_config.hpp"

#include <cmath>
#include <fstream>
#include <istream>

#include "etrate/errors.hpp"

namespace etrate {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool valid_key(const std::string& key) {
  if (key.empty()) return false;
  for (char c : key) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '_' || c == '.';
    if (!ok) return false;
  }
  return true;
}

}  // namespace

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  return parse(in, path);
}

RunConfig RunConfig::parse(std::istream& in, const std::string& origin) {
  RunConfig cfg;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string where = origin + ":" + std::to_string(number);
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (!valid_key(key)) throw ConfigError(where + ": invalid key '" + key + "'");
    if (value.empty()) throw ConfigError(where + ": " + key + ": missing value");
    if (cfg.has(key)) {
      throw ConfigError(where + ": " + key + ": duplicate key (first set at " + cfg.origin(key) + ")");
    }
    cfg.entries_[key] = Entry{value, where};
  }
  return cfg;
}

void RunConfig::set(const std::string& key, const std::string& value, const std::string& origin) {
  if (!valid_key(key)) throw ConfigError(origin + ": invalid key '" + key + "'");
  entries_[key] = Entry{value, origin};
}

void RunConfig::set_assignment(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("--set: expected key=value, got '" + assignment + "'");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)), "--set");
}

bool RunConfig::has(const std::string& key) const { return entries_.count(key) != 0; }

std::vector<std::string> RunConfig::keys() const {
  std::vector<std::string> out;
  for (const auto& [k, _] : entries_) out.push_back(k);
  return out;
}

std::string RunConfig::origin(const std::string& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? std::string() : it->second.origin;
}

void RunConfig::fail(const std::string& key, const std::string& message) const {
  const std::string where = origin(key);
  throw ConfigError((where.empty() ? std::string() : where + ": ") + key + ": " + message);
}

std::string RunConfig::str(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError(key + ": required key is missing");
  return it->second.value;
}

std::string RunConfig::str(const std::string& key, const std::string& fallback) const {
  return has(key) ? str(key) : fallback;
}

double RunConfig::number(const std::string& key) const {
  const std::string text = str(key);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(value)) fail(key, "expected a number, got '" + text + "'");
  return value;
}

double RunConfig::number(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

std::vector<double> RunConfig::numbers(const std::string& key) const {
  const std::string text = str(key);
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    const std::string part = trim(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != part.size() || !std::isfinite(value)) {
      fail(key, "expected a comma-separated list of numbers, got '" + text + "'");
    }
    out.push_back(value);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<double> RunConfig::numbers(const std::string& key, const std::vector<double>& fallback) const {
  return has(key) ? numbers(key) : fallback;
}

long long RunConfig::integer(const std::string& key, long long fallback) const {
  if (!has(key)) return fallback;
  const std::string text = str(key);
  std::size_t used = 0;
  long long value = 0;
  try {
    value = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) fail(key, "expected an integer, got '" + text + "'");
  return value;
}

std::uint64_t RunConfig::unsigned64(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string text = str(key);
  std::size_t used = 0;
  std::uint64_t value = 0;
  try {
    if (!text.empty() && text.front() != '-') value = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) fail(key, "expected an unsigned integer, got '" + text + "'");
  return value;
}

bool RunConfig::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string text = str(key);
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  fail(key, "expected true or false, got '" + text + "'");
}

void RunConfig::require_known(const std::set<std::string>& allowed) const {
  for (const auto& [key, entry] : entries_) {
    if (allowed.count(key) == 0) throw ConfigError(entry.origin + ": " + key + ": unknown key");
  }
}

}  // namespace etrate
