#include "rejlasso/config.hpp"

#include <algorithm>

#include "rejlasso/text_io.hpp"

namespace rejlasso {

KeyValueDoc KeyValueDoc::parse(std::string_view text) {
  KeyValueDoc doc;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    std::string_view line = text.substr(start, end == std::string_view::npos ? end : end - start);
    ++line_no;
    line = trim(line);
    if (!line.empty() && line.front() != '#') {
      auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
      }
      std::string key(trim(line.substr(0, eq)));
      std::string value(trim(line.substr(eq + 1)));
      if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
      if (doc.has(key)) throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
      doc.entries_.emplace_back(std::move(key), std::move(value));
    }
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return doc;
}

KeyValueDoc KeyValueDoc::load(const std::string& path) {
  try {
    return parse(read_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string KeyValueDoc::to_text() const {
  std::string out;
  for (const auto& [k, v] : entries_) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

bool KeyValueDoc::has(std::string_view key) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) { return e.first == key; });
}

const std::string& KeyValueDoc::get(std::string_view key) const {
  for (const auto& e : entries_) {
    if (e.first == key) return e.second;
  }
  throw ConfigError("missing key '" + std::string(key) + "'");
}

std::string KeyValueDoc::get_or(std::string_view key, std::string fallback) const {
  return has(key) ? get(key) : std::move(fallback);
}

double KeyValueDoc::get_double(std::string_view key) const {
  try {
    return parse_double(get(key));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError("key '" + std::string(key) + "': " + e.what());
  }
}

double KeyValueDoc::get_double_or(std::string_view key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::int64_t KeyValueDoc::get_int(std::string_view key) const {
  try {
    return parse_int(get(key));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError("key '" + std::string(key) + "': " + e.what());
  }
}

std::int64_t KeyValueDoc::get_int_or(std::string_view key, std::int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::uint64_t KeyValueDoc::get_u64_or(std::string_view key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  try {
    return parse_u64(get(key));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("key '" + std::string(key) + "': " + e.what());
  }
}

void KeyValueDoc::set(std::string key, std::string value) {
  for (auto& e : entries_) {
    if (e.first == key) {
      e.second = std::move(value);
      return;
    }
  }
  entries_.emplace_back(std::move(key), std::move(value));
}

void KeyValueDoc::set(std::string key, double value) { set(std::move(key), format_double(value)); }

void KeyValueDoc::set(std::string key, std::int64_t value) { set(std::move(key), std::to_string(value)); }

}  // namespace rejlasso
