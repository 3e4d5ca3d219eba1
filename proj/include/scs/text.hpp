#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scs {

// Shortest decimal form that parses back to the same double.
std::string format_number(double value);

std::optional<double> parse_number(std::string_view token);
std::optional<int> parse_int(std::string_view token);

// Whitespace-separated tokens.
std::vector<std::string_view> split_fields(std::string_view line);

}  // namespace scs
