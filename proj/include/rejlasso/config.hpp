#ifndef REJLASSO_CONFIG_HPP
#define REJLASSO_CONFIG_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rejlasso {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Ordered `key = value` document. Lines starting with '#' are comments; keys are
/// unique. Used for configs, dictionaries and model files.
class KeyValueDoc {
 public:
  KeyValueDoc() = default;

  static KeyValueDoc parse(std::string_view text);
  static KeyValueDoc load(const std::string& path);

  std::string to_text() const;

  bool has(std::string_view key) const;
  /// Throws ConfigError when the key is missing.
  const std::string& get(std::string_view key) const;
  std::string get_or(std::string_view key, std::string fallback) const;
  double get_double(std::string_view key) const;
  double get_double_or(std::string_view key, double fallback) const;
  std::int64_t get_int(std::string_view key) const;
  std::int64_t get_int_or(std::string_view key, std::int64_t fallback) const;
  std::uint64_t get_u64_or(std::string_view key, std::uint64_t fallback) const;

  /// Inserts or overwrites, keeping first-insertion order.
  void set(std::string key, std::string value);
  void set(std::string key, double value);
  void set(std::string key, std::int64_t value);

  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace rejlasso

#endif  // REJLASSO_CONFIG_HPP
