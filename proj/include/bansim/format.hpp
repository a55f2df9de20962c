#pragma once

// Locale-independent number formatting and parsing.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bansim {

/// Fixed-point with `precision` decimals, '.' separator.
std::string fixed(double value, int precision);

/// Shortest representation that parses back to the same double.
std::string shortest(double value);

double parse_double(std::string_view text);
std::int64_t parse_int(std::string_view text);

std::string_view trim(std::string_view text);
std::vector<std::string_view> split(std::string_view text, char sep);

std::string to_hex(std::uint64_t value, int width);

}  // namespace bansim
