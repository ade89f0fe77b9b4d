#ifndef REJLASSO_TEXT_IO_HPP
#define REJLASSO_TEXT_IO_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rejlasso {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

/// Whole-token parse; std::nullopt on any trailing garbage.
std::optional<double> try_parse_double(std::string_view s);
double parse_double(std::string_view s);
std::int64_t parse_int(std::string_view s);
std::uint64_t parse_u64(std::string_view s);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

/// Space-separated list of doubles, shortest round-trip form.
std::string join_doubles(std::span<const double> v, char sep = ' ');
std::vector<double> parse_doubles(std::string_view s, char sep = ' ');

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

std::string read_file(const std::string& path);
/// Throws std::runtime_error when the destination cannot be written.
void write_file(const std::string& path, std::string_view content);

}  // namespace rejlasso

#endif  // REJLASSO_TEXT_IO_HPP
