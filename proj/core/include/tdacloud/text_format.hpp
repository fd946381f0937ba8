#pragma once

#include <string>
#include <string_view>

namespace tdacloud {

/// Locale-independent shortest round-trip formatting ("inf" for +infinity).
std::string format_double(double value);

/// Locale-independent formatting with 17 significant digits, which
/// round-trips every binary64 value.
std::string format_double17(double value);

/// Parses a whole token as a double; returns false on any leftover text.
bool parse_double(std::string_view token, double& out);

bool parse_uint(std::string_view token, unsigned long long& out);

std::string_view trim(std::string_view text);

}  // namespace tdacloud
