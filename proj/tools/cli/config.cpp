#include "config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace kickho::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& text,
                            const std::string& expected) {
  throw ConfigError("invalid value for '" + key + "': \"" + text + "\" (expected " + expected +
                    ")");
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_flat(std::istream& in,
                                                            const std::string& source) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(number) + ": expected key = value");
    }
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(number) + ": empty key");
    out.emplace_back(key, trim(t.substr(eq + 1)));
  }
  return out;
}

double parse_real(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) bad_value(key, text, "a real number");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || !std::isfinite(v) || (errno == ERANGE && std::abs(v) > 1.0)) {
    bad_value(key, text, "a finite real number");
  }
  return v;
}

long parse_integer(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) bad_value(key, text, "an integer");
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size() || errno == ERANGE) bad_value(key, text, "an integer");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  bad_value(key, text, "true or false");
}

Config::Config(std::string command, std::vector<KeySpec> keys)
    : command_(std::move(command)), keys_(std::move(keys)) {
  for (const auto& k : keys_) values_.push_back(k.default_value);
}

std::size_t Config::index(const std::string& key) const {
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    if (keys_[i].name == key) return i;
  }
  throw ConfigError("unknown key '" + key + "' for command " + command_);
}

void Config::set(const std::string& key, const std::string& value) {
  values_[index(key)] = trim(value);
}

void Config::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  for (const auto& [k, v] : parse_flat(in, path)) set(k, v);
}

const std::string& Config::raw(const std::string& key) const { return values_[index(key)]; }

double Config::real(const std::string& key) const { return parse_real(key, raw(key)); }

double Config::positive(const std::string& key) const {
  const double v = real(key);
  if (!(v > 0.0)) bad_value(key, raw(key), "a positive number");
  return v;
}

long Config::integer(const std::string& key) const { return parse_integer(key, raw(key)); }

bool Config::flag(const std::string& key) const { return parse_bool(key, raw(key)); }

std::optional<long> Config::size_or_auto(const std::string& key) const {
  if (raw(key) == "auto") return std::nullopt;
  const long v = integer(key);
  if (v < 2) bad_value(key, raw(key), "auto or an integer >= 2");
  return v;
}

std::vector<long> Config::integer_list(const std::string& key) const {
  std::vector<long> out;
  std::stringstream ss(raw(key));
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_integer(key, item));
  if (out.empty()) bad_value(key, raw(key), "a comma-separated list of integers");
  return out;
}

std::vector<std::pair<std::string, std::string>> Config::resolved() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < keys_.size(); ++i) out.emplace_back(keys_[i].name, values_[i]);
  return out;
}

}  // namespace kickho::cli
