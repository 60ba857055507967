#ifndef KICKHO_CLI_CONFIG_HPP
#define KICKHO_CLI_CONFIG_HPP

#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kickho::cli {

/// Bad user input: unknown keys, malformed values, invalid parameters.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KeySpec {
  std::string name;
  std::string default_value;
  std::string help;
  bool is_flag = false;
};

/// Reads `key = value` lines. Blank lines and lines starting with '#' are
/// skipped; anything else without '=' is an error.
std::vector<std::pair<std::string, std::string>> parse_flat(std::istream& in,
                                                            const std::string& source);

/// Resolved settings for one subcommand. Only declared keys can be set;
/// later assignments win, so a config file applied before command-line flags
/// lets the flags override it.
class Config {
 public:
  Config(std::string command, std::vector<KeySpec> keys);

  const std::string& command() const noexcept { return command_; }
  const std::vector<KeySpec>& keys() const noexcept { return keys_; }

  void set(const std::string& key, const std::string& value);
  void load_file(const std::string& path);

  const std::string& raw(const std::string& key) const;
  double real(const std::string& key) const;
  double positive(const std::string& key) const;
  long integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  /// "auto" maps to nullopt.
  std::optional<long> size_or_auto(const std::string& key) const;
  std::vector<long> integer_list(const std::string& key) const;

  /// Every key with its resolved value, in declaration order.
  std::vector<std::pair<std::string, std::string>> resolved() const;

 private:
  std::size_t index(const std::string& key) const;

  std::string command_;
  std::vector<KeySpec> keys_;
  std::vector<std::string> values_;
};

double parse_real(const std::string& key, const std::string& text);
long parse_integer(const std::string& key, const std::string& text);
bool parse_bool(const std::string& key, const std::string& text);

}  // namespace kickho::cli

#endif
